#include "fctgan/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "fctgan/numerics/fft.hpp"
#include "fctgan/numerics/ops.hpp"

namespace fctgan {

GradcheckResult check_gradient(const std::string& name, const ScalarFn& f, const std::vector<Tensor<double>>& inputs,
                               Rng& rng, const GradcheckOptions& options) {
  Tape<double> tape;
  std::vector<Tensor<double>> tracked;
  tracked.reserve(inputs.size());
  for (const auto& in : inputs) tracked.push_back(tape.watch(in));
  const auto loss = f(tracked);
  const auto grads = tape.backward(loss);

  std::vector<Tensor<double>> analytic;
  std::size_t total = 0;
  for (const auto& t : tracked) {
    analytic.push_back(grads.or_zeros(t));
    total += t.size();
  }

  GradcheckResult result{name, 0.0, options.points, options.tolerance};
  for (std::size_t p = 0; p < options.points; ++p) {
    std::size_t flat = rng.index(total);
    std::size_t which = 0;
    while (flat >= inputs[which].size()) flat -= inputs[which++].size();

    auto eval_at = [&](double delta) {
      std::vector<Tensor<double>> shifted = inputs;
      auto values = shifted[which].to_vector();
      values[flat] += delta;
      shifted[which] = Tensor<double>(shifted[which].shape(), std::move(values));
      return f(shifted).item();
    };
    const double numeric = (eval_at(options.step) - eval_at(-options.step)) / (2.0 * options.step);
    const double exact = analytic[which][flat];
    const double denom = std::max({std::abs(exact), std::abs(numeric), options.floor});
    result.max_rel_error = std::max(result.max_rel_error, std::abs(exact - numeric) / denom);
  }
  return result;
}

Tensor<double> random_tensor(const Shape& shape, Rng& rng, double lo, double hi) {
  std::vector<double> v(numel(shape));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return Tensor<double>(shape, std::move(v));
}

Tensor<double> random_projection(const Tensor<double>& y, std::uint64_t seed) {
  Rng rng(seed);
  return ops::sum_all(ops::mul(y, random_tensor(y.shape(), rng)));
}

std::vector<GradcheckResult> primitive_gradchecks(std::uint64_t seed) {
  using T = Tensor<double>;
  using V = std::vector<T>;
  Rng rng(seed);
  std::vector<GradcheckResult> out;
  auto run = [&](const std::string& name, const ScalarFn& f, const V& inputs) {
    out.push_back(check_gradient(name, f, inputs, rng));
  };
  auto proj = [](const T& y) { return random_projection(y, 99); };

  run("add", [&](const V& x) { return proj(ops::add(x[0], x[1])); }, {random_tensor({3, 4}, rng), random_tensor({3, 4}, rng)});
  run("mul", [&](const V& x) { return proj(ops::mul(x[0], x[1])); }, {random_tensor({3, 4}, rng), random_tensor({3, 4}, rng)});
  run("matmul", [&](const V& x) { return proj(ops::matmul(x[0], x[1])); }, {random_tensor({3, 4}, rng), random_tensor({4, 2}, rng)});
  run("matmul_transposed", [&](const V& x) { return proj(ops::matmul(x[0], x[1], true, true)); },
      {random_tensor({4, 3}, rng), random_tensor({2, 4}, rng)});
  run("add_bcast", [&](const V& x) { return proj(ops::add_bcast(x[0], x[1])); }, {random_tensor({5, 3}, rng), random_tensor({3}, rng)});
  run("mul_bcast", [&](const V& x) { return proj(ops::mul_bcast(x[0], x[1])); }, {random_tensor({5, 3}, rng), random_tensor({3}, rng)});
  run("mul_scalar", [&](const V& x) { return proj(ops::mul_scalar(x[0], x[1])); }, {random_tensor({2, 3}, rng), random_tensor({}, rng)});
  run("sum_leading", [&](const V& x) { return proj(ops::sum_leading(x[0])); }, {random_tensor({4, 3}, rng)});
  run("sum_trailing", [&](const V& x) { return proj(ops::sum_trailing(x[0])); }, {random_tensor({4, 3}, rng)});
  run("mean", [&](const V& x) { return ops::mean_all(ops::mul(x[0], x[0])); }, {random_tensor({4, 3}, rng)});
  run("std", [&](const V& x) {
    const auto& v = x[0];
    const auto mu = ops::scale(ops::sum_leading(v), 1.0 / 6.0);
    const auto c = ops::sub(v, ops::bcast_leading(mu, 6));
    return proj(ops::pow(ops::scale(ops::sum_leading(ops::square(c)), 1.0 / 5.0), 0.5));
  }, {random_tensor({6, 3}, rng)});
  run("layer_norm", [&](const V& x) { return proj(ops::layer_norm(x[0], x[1], x[2])); },
      {random_tensor({4, 5}, rng), random_tensor({5}, rng, 0.5, 1.5), random_tensor({5}, rng)});
  run("gelu", [&](const V& x) { return proj(ops::gelu(x[0])); }, {random_tensor({3, 4}, rng, -3.0, 3.0)});
  run("tanh", [&](const V& x) { return proj(ops::tanh(x[0])); }, {random_tensor({3, 4}, rng, -2.0, 2.0)});
  run("exp", [&](const V& x) { return proj(ops::exp(x[0])); }, {random_tensor({3, 4}, rng)});
  run("log", [&](const V& x) { return proj(ops::log(x[0])); }, {random_tensor({3, 4}, rng, 0.5, 2.0)});
  run("pow", [&](const V& x) { return proj(ops::pow(x[0], -0.5)); }, {random_tensor({3, 4}, rng, 0.5, 2.0)});
  run("leaky_relu", [&](const V& x) { return proj(ops::leaky_relu(x[0], 0.2)); }, {random_tensor({3, 4}, rng)});
  run("norm2", [&](const V& x) { return ops::norm2(x[0]); }, {random_tensor({3, 4}, rng)});
  run("softmax_segments", [&](const V& x) {
    return proj(ops::softmax_segments(x[0], {{0, 1}, {1, 3}, {4, 2}}));
  }, {random_tensor({3, 6}, rng, -2.0, 2.0)});
  run("dropout", [&](const V& x) {
    Rng mask_rng(5);
    return proj(ops::dropout(x[0], 0.7, mask_rng));
  }, {random_tensor({4, 4}, rng)});
  run("reshape_transpose", [&](const V& x) { return proj(ops::transpose(ops::reshape(x[0], {4, 3}))); }, {random_tensor({2, 6}, rng)});
  run("gather_scatter", [&](const V& x) {
    const auto idx = ops::make_index_map({5, 0, 3, 3, 1});
    return proj(ops::scatter_add(ops::gather(x[0], idx, {5}), idx, {6}));
  }, {random_tensor({6}, rng)});
  run("concat_slice", [&](const V& x) {
    return proj(ops::slice_cols(ops::concat_cols<double>({x[0], x[1]}), 1, 4));
  }, {random_tensor({3, 2}, rng), random_tensor({3, 3}, rng)});
  run("rfft2", [&](const V& x) {
    const auto s = rfft2(x[0]);
    return ops::add(random_projection(s.re, 11), random_projection(s.im, 12));
  }, {random_tensor({4, 3, 2}, rng)});
  run("irfft2", [&](const V& x) { return proj(irfft2(ComplexSpectrum<double>{x[0], x[1], 5}, 5)); },
      {random_tensor({4, 3, 2}, rng), random_tensor({4, 3, 2}, rng)});
  run("complex_filter_mul", [&](const V& x) {
    const auto s = complex_filter_mul(ComplexSpectrum<double>{x[0], x[1], 4}, ComplexSpectrum<double>{x[2], x[3], 4});
    return ops::add(random_projection(s.re, 13), random_projection(s.im, 14));
  }, {random_tensor({2, 4, 3, 2}, rng), random_tensor({2, 4, 3, 2}, rng), random_tensor({4, 3, 2}, rng), random_tensor({4, 3, 2}, rng)});
  return out;
}

}  // namespace fctgan

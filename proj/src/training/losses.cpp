#include "fctgan/training/losses.hpp"

#include <stdexcept>

namespace fctgan {

template <typename T>
Tensor<T> gradient_penalty(const CriticFn<T>& critic, const Tensor<T>& real, const Tensor<T>& fake,
                           const std::vector<T>& eps, std::type_identity_t<Tape<T>>* tape) {
  if (real.shape() != fake.shape() || real.rank() != 2) {
    throw ShapeError("gradient_penalty: real " + shape_string(real.shape()) + " vs fake " +
                     shape_string(fake.shape()));
  }
  const std::size_t B = real.dim(0), d = real.dim(1);
  if (eps.size() != B) throw ShapeError("gradient_penalty: one eps per row expected");
  std::vector<T> mixed(B * d);
  for (std::size_t r = 0; r < B; ++r) {
    for (std::size_t j = 0; j < d; ++j) {
      mixed[r * d + j] = eps[r] * real[r * d + j] + (T(1) - eps[r]) * fake[r * d + j];
    }
  }
  Tape<T> scratch;
  Tape<T>& t = tape ? *tape : scratch;
  const auto x_hat = t.watch(Tensor<T>({B, d}, std::move(mixed)));
  const auto score = ops::sum_all(critic(x_hat));
  const auto grad = t.backward(score, true).or_zeros(x_hat);
  const auto norms = ops::pow(ops::add_const(ops::sum_trailing(ops::square(grad)), T(1e-16)), T(0.5));
  const auto gp = ops::mean_all(ops::square(ops::add_const(norms, T(-1))));
  return tape ? gp : gp.detach();
}

template <typename T>
Tensor<T> info_loss(const Tensor<T>& real, const Tensor<T>& fake) {
  if (real.rank() != 2 || fake.rank() != 2 || real.dim(1) != fake.dim(1)) {
    throw ShapeError("info_loss: feature widths differ");
  }
  auto moments = [](const Tensor<T>& x) {
    const std::size_t n = x.dim(0);
    if (n < 2) throw std::invalid_argument("info_loss: batch needs at least 2 rows");
    const auto mean = ops::scale(ops::sum_leading(x), T(1) / static_cast<T>(n));
    const auto centered = ops::sub(x, ops::bcast_leading(mean, n));
    const auto var = ops::scale(ops::sum_leading(ops::square(centered)), T(1) / static_cast<T>(n - 1));
    return std::pair{mean, ops::pow(ops::add_const(var, T(1e-12)), T(0.5))};
  };
  const auto [mr, sr] = moments(real);
  const auto [mf, sf] = moments(fake);
  return ops::add(ops::norm2(ops::sub(mr, mf)), ops::norm2(ops::sub(sr, sf)));
}

template <typename T>
Tensor<T> cond_loss(const Tensor<T>& fake, const std::vector<CondVector>& conds, const EncodedLayout& layout) {
  const std::size_t B = fake.dim(0), d = fake.dim(1);
  if (conds.size() != B) throw ShapeError("cond_loss: one condition per row expected");
  std::vector<std::size_t> index(B);
  for (std::size_t r = 0; r < B; ++r) {
    const auto seg = layout.columns.at(conds[r].column).onehot();
    if (!seg || conds[r].index >= seg->width) {
      throw std::invalid_argument("cond_loss: condition does not name a one-hot slot");
    }
    index[r] = r * d + seg->offset + conds[r].index;
  }
  const auto p = ops::gather(fake, ops::make_index_map(std::move(index)), {B});
  return ops::neg(ops::mean_all(ops::log(ops::add_const(p, T(1e-12)))));
}

template <typename T>
Tensor<T> downstream_loss(const Tensor<T>& rows, const AuxPredictor<T>& aux, const AuxLayout& layout) {
  const auto pred = aux.forward(aux_features(rows, layout));
  const auto target = aux_target(rows, layout);
  const auto B = static_cast<T>(rows.dim(0));
  if (layout.task == Task::classification) {
    const auto logp = ops::log(ops::add_const(ops::softmax_segments(pred, {{0, layout.output_width}}), T(1e-12)));
    return ops::scale(ops::sum_all(ops::mul(target, logp)), T(-1) / B);
  }
  return ops::mean_all(ops::square(ops::sub(pred, target)));
}

#define FCTGAN_INSTANTIATE_LOSSES(T)                                                                               \
  template Tensor<T> gradient_penalty(const CriticFn<T>&, const Tensor<T>&, const Tensor<T>&, const std::vector<T>&, \
                                      Tape<T>*);                                                                   \
  template Tensor<T> info_loss(const Tensor<T>&, const Tensor<T>&);                                                \
  template Tensor<T> cond_loss(const Tensor<T>&, const std::vector<CondVector>&, const EncodedLayout&);            \
  template Tensor<T> downstream_loss(const Tensor<T>&, const AuxPredictor<T>&, const AuxLayout&);

FCTGAN_INSTANTIATE_LOSSES(float)
FCTGAN_INSTANTIATE_LOSSES(double)

#undef FCTGAN_INSTANTIATE_LOSSES

}  // namespace fctgan

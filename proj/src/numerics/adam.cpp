#include "fctgan/numerics/adam.hpp"

#include <cmath>
#include <string>

namespace fctgan {

template <typename T>
void adam_step(const std::vector<Tensor<T>*>& params, const std::vector<Tensor<T>>& grads, AdamState<T>& state,
               const AdamConfig& config) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam_step: parameter/gradient count mismatch");
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.m[i].assign(params[i]->size(), T(0));
      state.v[i].assign(params[i]->size(), T(0));
    }
  }
  if (state.m.size() != params.size()) throw std::invalid_argument("adam_step: optimizer state does not match parameters");

  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].empty()) continue;
    if (grads[i].size() != params[i]->size()) {
      throw ShapeError("adam_step: gradient " + std::to_string(i) + " has shape " + shape_string(grads[i].shape()));
    }
    for (T g : grads[i].data()) {
      if (!std::isfinite(g)) throw NumericalFault("non-finite gradient for parameter " + std::to_string(i));
    }
  }

  ++state.step;
  const double b1 = config.beta1, b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].empty()) continue;
    auto& m = state.m[i];
    auto& v = state.v[i];
    auto values = params[i]->to_vector();
    const auto g = grads[i].data();
    for (std::size_t j = 0; j < values.size(); ++j) {
      m[j] = static_cast<T>(b1 * m[j] + (1.0 - b1) * g[j]);
      v[j] = static_cast<T>(b2 * v[j] + (1.0 - b2) * g[j] * g[j]);
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      values[j] = static_cast<T>(values[j] - config.lr * mhat / (std::sqrt(vhat) + config.eps));
    }
    params[i]->assign(std::move(values));
  }
}

template void adam_step<float>(const std::vector<Tensor<float>*>&, const std::vector<Tensor<float>>&,
                               AdamState<float>&, const AdamConfig&);
template void adam_step<double>(const std::vector<Tensor<double>*>&, const std::vector<Tensor<double>>&,
                                AdamState<double>&, const AdamConfig&);

}  // namespace fctgan

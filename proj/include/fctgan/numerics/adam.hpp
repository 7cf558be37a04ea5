#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fctgan/numerics/tensor.hpp"

namespace fctgan {

/// Raised when a loss or gradient stops being finite.
class NumericalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double eps = 1e-8;
};

template <typename T>
struct AdamState {
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;
  std::int64_t step = 0;
};

/// One bias-corrected Adam update. `grads[i]` may be empty, meaning zero.
/// Throws NumericalFault before touching any parameter if a gradient is not
/// finite.
template <typename T>
void adam_step(const std::vector<Tensor<T>*>& params, const std::vector<Tensor<T>>& grads, AdamState<T>& state,
               const AdamConfig& config);

}  // namespace fctgan

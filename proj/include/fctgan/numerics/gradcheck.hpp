#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fctgan/numerics/rng.hpp"
#include "fctgan/numerics/tensor.hpp"

namespace fctgan {

struct GradcheckResult {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t points = 0;
  double tolerance = 0.0;
  bool passed() const { return max_rel_error <= tolerance; }
};

struct GradcheckOptions {
  std::size_t points = 20;
  double step = 1e-6;
  double tolerance = 1e-5;
  /// Denominator floor of the relative error |a - n| / max(|a|, |n|, floor).
  double floor = 1e-3;
};

using ScalarFn = std::function<Tensor<double>(const std::vector<Tensor<double>>&)>;

/// Compares reverse-mode gradients of a scalar function with central finite
/// differences at `points` randomly chosen input coordinates.
GradcheckResult check_gradient(const std::string& name, const ScalarFn& f, const std::vector<Tensor<double>>& inputs,
                               Rng& rng, const GradcheckOptions& options = {});

/// Random tensor with entries uniform in [lo, hi).
Tensor<double> random_tensor(const Shape& shape, Rng& rng, double lo = -1.0, double hi = 1.0);

/// Scalar loss sum(y * w) with fixed random weights, so every output
/// coordinate contributes a distinct gradient.
Tensor<double> random_projection(const Tensor<double>& y, std::uint64_t seed);

/// Finite-difference checks of every differentiable primitive.
std::vector<GradcheckResult> primitive_gradchecks(std::uint64_t seed = 7);

}  // namespace fctgan

#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "fctgan/numerics/rng.hpp"

namespace fctgan {

struct VgmParams {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> stds;

  std::size_t modes() const { return weights.size(); }

  /// log(pi_k) + log N(x; mu_k, sigma_k) for every mode.
  std::vector<double> log_joint(double x) const;
};

struct VgmOptions {
  std::size_t max_modes = 10;
  double weight_floor = 0.005;
  double sigma_floor = 1e-6;
  std::size_t restarts = 3;
  std::size_t max_iter = 200;
  double tol = 1e-7;          // on the mean log-likelihood change
  std::size_t max_fit_rows = 20000;  // larger inputs are subsampled
};

/// Gaussian mixture fitted by EM with k-means++ starts. The mode count is
/// chosen by BIC over 1..max_modes, then modes lighter than weight_floor are
/// pruned and the weights renormalized. Throws DataError on non-finite input
/// or fewer than two values.
VgmParams fit_vgm(std::span<const double> values, const VgmOptions& options, Rng& rng);

/// Mean log-likelihood of `values` under `p`.
double vgm_log_likelihood(const VgmParams& p, std::span<const double> values);

nlohmann::json vgm_to_json(const VgmParams& p);
VgmParams vgm_from_json(const nlohmann::json& j);

}  // namespace fctgan

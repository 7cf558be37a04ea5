#pragma once

#include <span>
#include <vector>

#include "fctgan/encoding/vgm.hpp"
#include "fctgan/numerics/rng.hpp"

namespace fctgan {

struct ModeCode {
  double alpha = 0.0;
  std::size_t mode = 0;
};

/// Samples a mode with probability proportional to pi_k N(x; mu_k, sigma_k)
/// and returns alpha = clamp((x - mu_k) / (4 sigma_k), -1, 1).
ModeCode encode_continuous(double x, const VgmParams& p, Rng& rng);
/// mu_k + 4 sigma_k alpha for the given mode, alpha clamped to [-1, 1].
double decode_continuous(double alpha, std::size_t mode, const VgmParams& p);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> v);

/// Affine map [lo, hi] -> [-1, 1], clamped. A degenerate range encodes as 0.
double encode_minmax(double x, double lo, double hi);
/// Inverse of encode_minmax; `decimals` >= 0 rounds to that many places.
double decode_minmax(double a, double lo, double hi, int decimals = -1);

/// Smallest number of decimal places (up to 8) that reproduces every value
/// exactly, or -1 when none does.
int detect_decimals(std::span<const double> values);
double round_decimals(double x, int decimals);

/// Mixed columns use one-hot slots [specials..., modes...]. A NaN entry in
/// `specials` stands for the missing value.
struct MixedCode {
  double alpha = 0.0;
  std::size_t slot = 0;
};

MixedCode encode_mixed(double x, std::span<const double> specials, const VgmParams& p, Rng& rng);
double decode_mixed(double alpha, std::size_t slot, std::span<const double> specials, const VgmParams& p);

/// Position of x in `specials` (NaN matches NaN), or specials.size().
std::size_t special_slot(double x, std::span<const double> specials);

}  // namespace fctgan

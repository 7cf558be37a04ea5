#include "fctgan/encoding/codec.hpp"

#include <algorithm>
#include <cmath>

namespace fctgan {

ModeCode encode_continuous(double x, const VgmParams& p, Rng& rng) {
  auto lj = p.log_joint(x);
  const double top = *std::max_element(lj.begin(), lj.end());
  for (double& v : lj) v = std::exp(v - top);
  const std::size_t k = p.modes() == 1 ? 0 : rng.categorical(lj);
  const double alpha = std::clamp((x - p.means[k]) / (4.0 * p.stds[k]), -1.0, 1.0);
  return ModeCode{alpha, k};
}

double decode_continuous(double alpha, std::size_t mode, const VgmParams& p) {
  return p.means.at(mode) + 4.0 * p.stds.at(mode) * std::clamp(alpha, -1.0, 1.0);
}

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

double encode_minmax(double x, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  return std::clamp(2.0 * (x - lo) / (hi - lo) - 1.0, -1.0, 1.0);
}

double round_decimals(double x, int decimals) {
  if (decimals < 0) return x;
  const double scale = std::pow(10.0, decimals);
  return std::round(x * scale) / scale;
}

double decode_minmax(double a, double lo, double hi, int decimals) {
  if (!(hi > lo)) return lo;
  const double x = lo + (std::clamp(a, -1.0, 1.0) + 1.0) * 0.5 * (hi - lo);
  return std::clamp(round_decimals(x, decimals), lo, hi);
}

int detect_decimals(std::span<const double> values) {
  for (int d = 0; d <= 8; ++d) {
    bool ok = true;
    for (double v : values) {
      if (std::isfinite(v) && round_decimals(v, d) != v) {
        ok = false;
        break;
      }
    }
    if (ok) return d;
  }
  return -1;
}

std::size_t special_slot(double x, std::span<const double> specials) {
  for (std::size_t i = 0; i < specials.size(); ++i) {
    if (specials[i] == x || (std::isnan(specials[i]) && std::isnan(x))) return i;
  }
  return specials.size();
}

MixedCode encode_mixed(double x, std::span<const double> specials, const VgmParams& p, Rng& rng) {
  const std::size_t s = special_slot(x, specials);
  if (s < specials.size()) return MixedCode{0.0, s};
  const auto c = encode_continuous(x, p, rng);
  return MixedCode{c.alpha, specials.size() + c.mode};
}

double decode_mixed(double alpha, std::size_t slot, std::span<const double> specials, const VgmParams& p) {
  if (slot < specials.size()) return specials[slot];
  return decode_continuous(alpha, slot - specials.size(), p);
}

}  // namespace fctgan

#include "fctgan/encoding/vgm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fctgan/encoding/schema.hpp"

namespace fctgan {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

struct Fit {
  VgmParams params;
  double log_likelihood = -std::numeric_limits<double>::infinity();
};

std::vector<double> kmeans_pp_centers(std::span<const double> x, std::size_t m, Rng& rng) {
  std::vector<double> centers{x[rng.index(x.size())]};
  std::vector<double> d2(x.size());
  while (centers.size() < m) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (x[i] - c) * (x[i] - c));
      d2[i] = best;
    }
    double total = 0;
    for (double d : d2) total += d;
    if (total <= 0) break;
    centers.push_back(x[rng.categorical(d2)]);
  }
  return centers;
}

Fit run_em(std::span<const double> x, std::size_t m, const VgmOptions& opt, Rng& rng) {
  const std::size_t n = x.size();
  auto centers = kmeans_pp_centers(x, m, rng);
  m = centers.size();

  // Lloyd refinement of the seeds.
  std::vector<std::size_t> label(n, 0);
  for (int it = 0; it < 10; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < m; ++k) {
        if (std::abs(x[i] - centers[k]) < std::abs(x[i] - centers[best])) best = k;
      }
      label[i] = best;
    }
    std::vector<double> sum(m, 0.0), cnt(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[label[i]] += x[i];
      cnt[label[i]] += 1;
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (cnt[k] > 0) centers[k] = sum[k] / cnt[k];
    }
  }

  VgmParams p;
  p.weights.assign(m, 0.0);
  p.means = centers;
  p.stds.assign(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    p.weights[label[i]] += 1;
    p.stds[label[i]] += (x[i] - centers[label[i]]) * (x[i] - centers[label[i]]);
  }
  for (std::size_t k = 0; k < m; ++k) {
    p.stds[k] = p.weights[k] > 0 ? std::sqrt(p.stds[k] / p.weights[k]) : 1.0;
    p.stds[k] = std::max(p.stds[k], opt.sigma_floor);
    p.weights[k] = std::max(p.weights[k], 1.0) / static_cast<double>(n);
  }
  double wsum = 0;
  for (double w : p.weights) wsum += w;
  for (double& w : p.weights) w /= wsum;

  std::vector<double> resp(n * m);
  double prev = -std::numeric_limits<double>::infinity();
  double ll = prev;
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    // E step.
    ll = 0;
    std::vector<double> offset(m), inv(m);
    for (std::size_t k = 0; k < m; ++k) {
      offset[k] = std::log(p.weights[k]) - std::log(p.stds[k]) - kLogSqrt2Pi;
      inv[k] = 1.0 / p.stds[k];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double* r = resp.data() + i * m;
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < m; ++k) {
        const double z = (x[i] - p.means[k]) * inv[k];
        r[k] = offset[k] - 0.5 * z * z;
        top = std::max(top, r[k]);
      }
      double s = 0;
      for (std::size_t k = 0; k < m; ++k) {
        r[k] = std::exp(r[k] - top);
        s += r[k];
      }
      ll += top + std::log(s);
      for (std::size_t k = 0; k < m; ++k) r[k] /= s;
    }
    ll /= static_cast<double>(n);
    if (std::abs(ll - prev) < opt.tol) break;
    prev = ll;

    // M step.
    for (std::size_t k = 0; k < m; ++k) {
      double nk = 0, s = 0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * m + k];
        s += resp[i * m + k] * x[i];
      }
      if (nk < 1e-12) {
        p.weights[k] = 1e-12;
        continue;
      }
      const double mu = s / nk;
      double v = 0;
      for (std::size_t i = 0; i < n; ++i) v += resp[i * m + k] * (x[i] - mu) * (x[i] - mu);
      p.weights[k] = nk / static_cast<double>(n);
      p.means[k] = mu;
      p.stds[k] = std::max(std::sqrt(v / nk), opt.sigma_floor);
    }
  }
  return Fit{p, ll * static_cast<double>(n)};
}

}  // namespace

std::vector<double> VgmParams::log_joint(double x) const {
  std::vector<double> out(modes());
  for (std::size_t k = 0; k < modes(); ++k) {
    const double z = (x - means[k]) / stds[k];
    out[k] = std::log(weights[k]) - 0.5 * z * z - std::log(stds[k]) - kLogSqrt2Pi;
  }
  return out;
}

double vgm_log_likelihood(const VgmParams& p, std::span<const double> values) {
  double ll = 0;
  for (double v : values) ll += log_sum_exp(p.log_joint(v));
  return ll / static_cast<double>(values.size());
}

VgmParams fit_vgm(std::span<const double> values, const VgmOptions& options, Rng& rng) {
  if (values.size() < 2) throw DataError("mixture fit needs at least two values");
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("mixture fit got a non-finite value");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) return VgmParams{{1.0}, {*lo}, {options.sigma_floor}};

  std::vector<double> x(values.begin(), values.end());
  if (x.size() > options.max_fit_rows) {
    std::shuffle(x.begin(), x.end(), rng.engine());
    x.resize(options.max_fit_rows);
  }
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());

  const double n = static_cast<double>(x.size());
  const std::size_t max_m = std::max<std::size_t>(1, std::min(options.max_modes, distinct));
  Fit best;
  double best_bic = std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m <= max_m; ++m) {
    Fit fm;
    for (std::size_t r = 0; r < options.restarts; ++r) {
      Fit f = run_em(x, m, options, rng);
      if (f.log_likelihood > fm.log_likelihood) fm = std::move(f);
      if (m == 1) break;
    }
    const double k = 3.0 * static_cast<double>(fm.params.modes()) - 1.0;
    const double bic = -2.0 * fm.log_likelihood + k * std::log(n);
    if (bic < best_bic) {
      best_bic = bic;
      best = std::move(fm);
    }
  }

  VgmParams out;
  for (std::size_t k = 0; k < best.params.modes(); ++k) {
    if (best.params.weights[k] < options.weight_floor) continue;
    out.weights.push_back(best.params.weights[k]);
    out.means.push_back(best.params.means[k]);
    out.stds.push_back(best.params.stds[k]);
  }
  if (out.weights.empty()) {
    const auto k = static_cast<std::size_t>(std::max_element(best.params.weights.begin(), best.params.weights.end()) -
                                            best.params.weights.begin());
    out = VgmParams{{1.0}, {best.params.means[k]}, {best.params.stds[k]}};
  }
  double total = 0;
  for (double w : out.weights) total += w;
  for (double& w : out.weights) w /= total;

  // Modes sorted by mean.
  std::vector<std::size_t> idx(out.modes());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return out.means[a] < out.means[b]; });
  VgmParams sorted_out;
  for (std::size_t i : idx) {
    sorted_out.weights.push_back(out.weights[i]);
    sorted_out.means.push_back(out.means[i]);
    sorted_out.stds.push_back(out.stds[i]);
  }
  return sorted_out;
}

nlohmann::json vgm_to_json(const VgmParams& p) {
  return nlohmann::json{{"weights", p.weights}, {"means", p.means}, {"stds", p.stds}};
}

VgmParams vgm_from_json(const nlohmann::json& j) {
  VgmParams p;
  p.weights = j.at("weights").get<std::vector<double>>();
  p.means = j.at("means").get<std::vector<double>>();
  p.stds = j.at("stds").get<std::vector<double>>();
  if (p.weights.empty() || p.means.size() != p.weights.size() || p.stds.size() != p.weights.size()) {
    throw SchemaError("inconsistent mixture parameters");
  }
  return p;
}

}  // namespace fctgan

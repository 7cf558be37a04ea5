#include "fctgan/evaluation/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace fctgan {

namespace {

bool numeric_cell(const ColumnSpec& spec, double v) {
  if (std::isnan(v)) return false;
  if (spec.kind != ColumnKind::mixed) return true;
  return std::find(spec.specials.begin(), spec.specials.end(), v) == spec.specials.end();
}

std::vector<double> numeric_values(const std::vector<double>& column, const ColumnSpec& spec) {
  std::vector<double> out;
  out.reserve(column.size());
  for (double v : column) {
    if (numeric_cell(spec, v)) out.push_back(v);
  }
  return out;
}

std::size_t category_count(const ColumnSpec& spec, const std::vector<double>& a, const std::vector<double>& b = {}) {
  std::size_t k = spec.vocabulary.size();
  for (double v : a) k = std::max(k, static_cast<std::size_t>(v) + 1);
  for (double v : b) k = std::max(k, static_cast<std::size_t>(v) + 1);
  return k;
}

double entropy(std::span<const double> counts) {
  double total = 0, h = 0;
  for (double c : counts) total += c;
  if (total <= 0) return 0;
  for (double c : counts) {
    if (c > 0) h -= c / total * std::log(c / total);
  }
  return h;
}

void require_same_schema(const Table& a, const Table& b, const TableSchema& schema) {
  if (a.cols() != schema.columns.size() || b.cols() != schema.columns.size()) {
    throw std::invalid_argument("tables do not match the schema's column count");
  }
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return 0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double correlation_ratio(const std::vector<double>& cat, const std::vector<double>& y) {
  std::map<double, std::pair<double, double>> groups;  // sum, count
  double mean = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto& g = groups[cat[i]];
    g.first += y[i];
    g.second += 1;
    mean += y[i];
  }
  if (y.empty()) return 0;
  mean /= static_cast<double>(y.size());
  double total = 0, between = 0;
  for (double v : y) total += (v - mean) * (v - mean);
  for (const auto& [k, g] : groups) {
    const double m = g.first / g.second;
    between += g.second * (m - mean) * (m - mean);
  }
  if (total <= 0) return 0;
  return std::clamp(std::sqrt(between / total), 0.0, 1.0);
}

// U(x | y) with natural-log entropies; 1 when H(x) == 0.
double uncertainty(const std::vector<double>& x, const std::vector<double>& y, std::size_t kx, std::size_t ky) {
  std::vector<double> joint(kx * ky, 0.0), px(kx, 0.0), py(ky, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto a = static_cast<std::size_t>(x[i]), b = static_cast<std::size_t>(y[i]);
    joint[a * ky + b] += 1;
    px[a] += 1;
    py[b] += 1;
  }
  const double hx = entropy(px);
  if (hx <= 0) return 1.0;
  const double n = static_cast<double>(x.size());
  double h_cond = 0;
  for (std::size_t b = 0; b < ky; ++b) {
    if (py[b] <= 0) continue;
    std::vector<double> col(kx);
    for (std::size_t a = 0; a < kx; ++a) col[a] = joint[a * ky + b];
    h_cond += py[b] / n * entropy(col);
  }
  return std::clamp((hx - h_cond) / hx, 0.0, 1.0);
}

}  // namespace

double jsd(std::span<const double> p_counts, std::span<const double> q_counts) {
  if (p_counts.size() != q_counts.size()) throw std::invalid_argument("jsd: count vectors differ in length");
  double sp = 0, sq = 0;
  for (double v : p_counts) sp += v;
  for (double v : q_counts) sq += v;
  if (sp <= 0 || sq <= 0) throw std::invalid_argument("jsd: empty distribution");
  double out = 0;
  for (std::size_t i = 0; i < p_counts.size(); ++i) {
    // Canonical order keeps the result exactly symmetric under contraction.
    const double p = std::min(p_counts[i] / sp, q_counts[i] / sq), q = std::max(p_counts[i] / sp, q_counts[i] / sq);
    const double m = 0.5 * (p + q);
    const double tp = p > 0 ? p * std::log2(p / m) : 0.0, tq = q > 0 ? q * std::log2(q / m) : 0.0;
    out += 0.5 * (tp + tq);
  }
  return std::clamp(out, 0.0, 1.0);
}

std::optional<double> avg_jsd(const Table& real, const Table& synth, const TableSchema& schema) {
  require_same_schema(real, synth, schema);
  double total = 0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < schema.columns.size(); ++j) {
    const auto& spec = schema.columns[j];
    if (!spec.is_categorical()) continue;
    const std::size_t k = category_count(spec, real.columns[j], synth.columns[j]);
    std::vector<double> p(k, 0.0), q(k, 0.0);
    for (double v : real.columns[j]) p[static_cast<std::size_t>(v)] += 1;
    for (double v : synth.columns[j]) q[static_cast<std::size_t>(v)] += 1;
    total += jsd(p, q);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return total / static_cast<double>(n);
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein1: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  // Integral of |F_a - F_b| over the merged support.
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, k = 0;
  double prev = std::min(a[0], b[0]), out = 0;
  while (i < a.size() || k < b.size()) {
    const double next = k == b.size() || (i < a.size() && a[i] <= b[k]) ? a[i] : b[k];
    out += std::abs(static_cast<double>(i) / na - static_cast<double>(k) / nb) * (next - prev);
    while (i < a.size() && a[i] == next) ++i;
    while (k < b.size() && b[k] == next) ++k;
    prev = next;
  }
  return out;
}

std::optional<double> avg_wd(const Table& real, const Table& synth, const TableSchema& schema,
                             std::vector<std::string>* warnings) {
  require_same_schema(real, synth, schema);
  double total = 0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < schema.columns.size(); ++j) {
    const auto& spec = schema.columns[j];
    if (!spec.is_numeric()) continue;
    auto a = numeric_values(real.columns[j], spec);
    auto b = numeric_values(synth.columns[j], spec);
    if (a.empty() || b.empty()) {
      if (warnings) warnings->push_back("avg_wd: column '" + spec.name + "' has no numeric cells; skipped");
      continue;
    }
    const auto [lo_it, hi_it] = std::minmax_element(a.begin(), a.end());
    const double lo = *lo_it, range = *hi_it - *lo_it;
    if (range <= 0) {
      if (warnings) warnings->push_back("avg_wd: column '" + spec.name + "' is constant in the real data; skipped");
      continue;
    }
    for (auto& v : a) v = (v - lo) / range;
    for (auto& v : b) v = (v - lo) / range;
    total += wasserstein1(std::move(a), std::move(b));
    ++n;
  }
  if (n == 0) return std::nullopt;
  return total / static_cast<double>(n);
}

Matrix corr_matrix(const Table& table, const TableSchema& schema, std::vector<std::string>* warnings) {
  const std::size_t n = schema.columns.size();
  if (table.cols() != n) throw std::invalid_argument("corr_matrix: table does not match the schema");
  if (n < 2) throw std::invalid_argument("corr_matrix: needs at least 2 columns");
  if (table.rows() < 3) throw std::invalid_argument("corr_matrix: needs at least 3 rows");
  Matrix c(n, n, 0.0);
  std::vector<std::size_t> cats(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    if (schema.columns[j].is_categorical()) cats[j] = category_count(schema.columns[j], table.columns[j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    const auto& si = schema.columns[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& sj = schema.columns[j];
      std::vector<double> x, y;
      for (std::size_t r = 0; r < table.rows(); ++r) {
        const double a = table.columns[i][r], b = table.columns[j][r];
        if ((si.is_numeric() && !numeric_cell(si, a)) || (sj.is_numeric() && !numeric_cell(sj, b))) continue;
        x.push_back(a);
        y.push_back(b);
      }
      if (si.is_categorical() && sj.is_categorical()) {
        c(i, j) = uncertainty(x, y, cats[i], cats[j]);
        c(j, i) = uncertainty(y, x, cats[j], cats[i]);
      } else if (si.is_categorical()) {
        c(i, j) = c(j, i) = correlation_ratio(x, y);
      } else if (sj.is_categorical()) {
        c(i, j) = c(j, i) = correlation_ratio(y, x);
      } else {
        c(i, j) = c(j, i) = pearson(x, y);
      }
    }
  }
  if (warnings) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!schema.columns[j].is_numeric()) continue;
      const auto v = numeric_values(table.columns[j], schema.columns[j]);
      if (v.empty() || *std::max_element(v.begin(), v.end()) == *std::min_element(v.begin(), v.end())) {
        warnings->push_back("corr_matrix: column '" + schema.columns[j].name + "' has zero variance");
      }
    }
  }
  return c;
}

double diff_corr(const Table& real, const Table& synth, const TableSchema& schema) {
  require_same_schema(real, synth, schema);
  const auto a = corr_matrix(real, schema), b = corr_matrix(synth, schema);
  double ss = 0;
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      if (i != j) ss += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
    }
  }
  return std::sqrt(ss);
}

double mav(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("mav: needs at least 2 values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

std::optional<double> normalized_mav(std::span<const double> values) {
  const double m = mav(values);
  const double lo = *std::min_element(values.begin(), values.end());
  if (lo == 0) return std::nullopt;
  return m / lo * 100.0;
}

}  // namespace fctgan

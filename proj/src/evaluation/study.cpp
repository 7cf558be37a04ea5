#include "fctgan/evaluation/study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fctgan/evaluation/metrics.hpp"

namespace fctgan {

const char* to_string(ColumnOrder order) {
  switch (order) {
    case ColumnOrder::original: return "original";
    case ColumnOrder::by_type: return "by_type";
    case ColumnOrder::by_correlation: return "by_correlation";
  }
  return "?";
}

ColumnOrder parse_column_order(const std::string& s) {
  if (s == "original") return ColumnOrder::original;
  if (s == "by_type") return ColumnOrder::by_type;
  if (s == "by_correlation") return ColumnOrder::by_correlation;
  throw std::invalid_argument("unknown column order '" + s + "' (expected original, by_type, by_correlation)");
}

std::vector<std::size_t> column_order(const Table& table, const TableSchema& schema, ColumnOrder mode) {
  const std::size_t n = schema.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (mode == ColumnOrder::by_type) {
    std::stable_partition(order.begin(), order.end(), [&](auto i) { return schema[i].is_numeric(); });
  } else if (mode == ColumnOrder::by_correlation) {
    order = correlation_order(corr_matrix(table, schema));
  }
  return order;
}

std::vector<std::size_t> correlation_order(const Matrix& c) {
  const std::size_t n = c.rows;
  struct Pair {
    double strength;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({std::max(std::abs(c(i, j)), std::abs(c(j, i))), i, j});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.strength > b.strength; });
  std::vector<bool> placed(n, false);
  std::vector<std::size_t> order;
  auto place = [&](std::size_t k) {
    if (!placed[k]) {
      placed[k] = true;
      order.push_back(k);
    }
  };
  for (const auto& p : pairs) {
    place(p.i);
    place(p.j);
  }
  for (std::size_t k = 0; k < n; ++k) place(k);
  return order;
}

std::vector<MavEntry> mav_entries(const std::vector<OrderResult>& orders) {
  std::vector<MavEntry> out;
  if (orders.size() < 2) return out;
  for (const auto& [name, first] : orders.front().report.values()) {
    MavEntry e;
    e.metric = name;
    for (const auto& o : orders) {
      const auto vals = o.report.values();
      const auto it = std::find_if(vals.begin(), vals.end(), [&](const auto& kv) { return kv.first == name; });
      if (it == vals.end()) break;
      e.values.push_back(it->second);
    }
    if (e.values.size() != orders.size()) continue;
    e.mav = mav(e.values);
    e.normalized = normalized_mav(e.values);
    out.push_back(std::move(e));
  }
  return out;
}

PermStudyReport perm_study(const Table& train, const Table* test, const TableSchema& schema,
                           const Synthesizer& synthesize, const PermStudyConfig& config) {
  if (config.orders.empty()) throw std::invalid_argument("perm_study: no column orders");
  if (config.runs == 0) throw std::invalid_argument("perm_study: runs must be at least 1");
  PermStudyReport report;
  for (const auto mode : config.orders) {
    OrderResult result;
    result.order = mode;
    result.permutation = column_order(train, schema, mode);
    const auto p_schema = schema.permuted(result.permutation);
    const auto p_train = train.permuted(result.permutation);
    std::optional<Table> p_test;
    if (test) p_test = test->permuted(result.permutation);
    std::vector<MetricsReport> runs;
    for (std::size_t r = 0; r < config.runs; ++r) {
      const std::uint64_t seed = config.seed + r;
      const Table synth = synthesize(p_train, p_schema, seed);
      runs.push_back(evaluate(p_train, synth, p_schema, p_test ? &*p_test : nullptr, seed));
    }
    result.report = config.runs == 1 ? std::move(runs.front()) : average_reports(runs);
    report.orders.push_back(std::move(result));
  }
  report.mav = mav_entries(report.orders);
  return report;
}

nlohmann::json mav_to_json(const std::vector<MavEntry>& entries) {
  auto out = nlohmann::json::array();
  for (const auto& e : entries) {
    out.push_back({{"metric", e.metric},
                   {"values", e.values},
                   {"mav", e.mav},
                   {"normalized_mav", e.normalized ? nlohmann::json(*e.normalized) : nlohmann::json(nullptr)}});
  }
  return out;
}

nlohmann::json perm_study_to_json(const PermStudyReport& report) {
  nlohmann::json j;
  j["orders"] = nlohmann::json::array();
  for (const auto& o : report.orders) {
    j["orders"].push_back(
        {{"order", to_string(o.order)}, {"permutation", o.permutation}, {"report", report_to_json(o.report)}});
  }
  j["mav"] = mav_to_json(report.mav);
  return j;
}

std::string format_mav(const std::vector<MavEntry>& entries) {
  std::size_t width = 6;
  for (const auto& e : entries) width = std::max(width, e.metric.size());
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  os << std::string(width - 6, ' ') << "metric  mav  normalized_mav(%)\n";
  for (const auto& e : entries) {
    os << std::string(width - e.metric.size(), ' ') << e.metric << "  " << e.mav << "  ";
    if (e.normalized) {
      os << *e.normalized;
    } else {
      os << "undefined";
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace fctgan

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fctgan/evaluation/report.hpp"

namespace fctgan {

enum class ColumnOrder { original, by_type, by_correlation };

const char* to_string(ColumnOrder order);
ColumnOrder parse_column_order(const std::string& s);

/// Column permutation: entry i is the original index placed at position i.
///   original        identity
///   by_type         numeric columns first, then categorical, stable
///   by_correlation  pairs by max(|c_ij|, |c_ji|) descending (ties keep index
///                   order), members appended unless already placed, leftovers
///                   in original order
std::vector<std::size_t> column_order(const Table& table, const TableSchema& schema, ColumnOrder mode);

/// The by_correlation greedy applied to an association matrix.
std::vector<std::size_t> correlation_order(const Matrix& corr);

/// Trains on `train` (in the given schema's column order) and returns a
/// synthetic table in the same order.
using Synthesizer = std::function<Table(const Table& train, const TableSchema& schema, std::uint64_t seed)>;

struct PermStudyConfig {
  std::vector<ColumnOrder> orders{ColumnOrder::original, ColumnOrder::by_type, ColumnOrder::by_correlation};
  std::size_t runs = 1;
  std::uint64_t seed = 0;
};

struct OrderResult {
  ColumnOrder order = ColumnOrder::original;
  std::vector<std::size_t> permutation;
  MetricsReport report;
};

struct MavEntry {
  std::string metric;
  std::vector<double> values;  // one per order, in study order
  double mav = 0;
  std::optional<double> normalized;  // percent; absent when min == 0
};

struct PermStudyReport {
  std::vector<OrderResult> orders;
  std::vector<MavEntry> mav;
};

/// For each order: permute train/test/schema, synthesize with seeds
/// seed, seed + 1, ... (one per run), evaluate in the permuted column order,
/// average over runs. MAV entries need at least 2 orders and cover metrics
/// present in every order.
PermStudyReport perm_study(const Table& train, const Table* test, const TableSchema& schema,
                           const Synthesizer& synthesize, const PermStudyConfig& config);

/// MAV entries recomputed from per-order reports.
std::vector<MavEntry> mav_entries(const std::vector<OrderResult>& orders);

nlohmann::json perm_study_to_json(const PermStudyReport& report);
nlohmann::json mav_to_json(const std::vector<MavEntry>& entries);
std::string format_mav(const std::vector<MavEntry>& entries);

}  // namespace fctgan

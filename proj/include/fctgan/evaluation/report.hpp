#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fctgan/evaluation/ml.hpp"

namespace fctgan {

struct MetricsReport {
  std::optional<double> avg_jsd;
  std::optional<double> avg_wd;
  std::optional<double> diff_corr;
  std::optional<MlUtility> ml;
  std::vector<std::string> warnings;

  /// Flat (name, value) list in report order: avg_jsd, avg_wd, diff_corr,
  /// then ml.<metric> deltas. Absent metrics are omitted.
  std::vector<std::pair<std::string, double>> values() const;
};

/// Statistical metrics of `synth` against `real`, plus ML utility when the
/// schema has a target and a test table is given.
MetricsReport evaluate(const Table& real, const Table& synth, const TableSchema& schema,
                       const Table* test = nullptr, std::uint64_t seed = 0);

/// Element-wise mean of reports over runs. Learner detail is dropped; a metric
/// present in only some runs is averaged over those runs.
MetricsReport average_reports(const std::vector<MetricsReport>& runs);

nlohmann::json report_to_json(const MetricsReport& report);
/// Aligned two-column text table.
std::string format_report(const MetricsReport& report);

}  // namespace fctgan

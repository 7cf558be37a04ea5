#include "fctgan/evaluation/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fctgan/evaluation/metrics.hpp"

namespace fctgan {

std::vector<std::pair<std::string, double>> MetricsReport::values() const {
  std::vector<std::pair<std::string, double>> out;
  if (avg_jsd) out.emplace_back("avg_jsd", *avg_jsd);
  if (avg_wd) out.emplace_back("avg_wd", *avg_wd);
  if (diff_corr) out.emplace_back("diff_corr", *diff_corr);
  if (ml) {
    for (const auto& name : ml_metric_names(ml->task)) {
      const auto it = ml->deltas.find(name);
      if (it != ml->deltas.end()) out.emplace_back("ml." + name, it->second);
    }
  }
  return out;
}

MetricsReport evaluate(const Table& real, const Table& synth, const TableSchema& schema, const Table* test,
                       std::uint64_t seed) {
  MetricsReport r;
  r.avg_jsd = avg_jsd(real, synth, schema);
  r.avg_wd = avg_wd(real, synth, schema, &r.warnings);
  if (schema.size() >= 2 && real.rows() >= 3 && synth.rows() >= 3) {
    corr_matrix(real, schema, &r.warnings);
    r.diff_corr = diff_corr(real, synth, schema);
  } else {
    r.warnings.push_back("diff_corr needs at least 2 columns and 3 rows; omitted");
  }
  if (test && schema.target_index()) {
    r.ml = ml_utility(real, synth, *test, schema, seed);
    for (const auto& w : r.ml->warnings) r.warnings.push_back("ml: " + w);
  }
  return r;
}

MetricsReport average_reports(const std::vector<MetricsReport>& runs) {
  if (runs.empty()) throw std::invalid_argument("average_reports: no runs");
  auto mean = [&](auto get) -> std::optional<double> {
    double s = 0;
    std::size_t n = 0;
    for (const auto& r : runs) {
      if (const std::optional<double> v = get(r)) {
        s += *v;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return s / static_cast<double>(n);
  };
  MetricsReport out;
  out.avg_jsd = mean([](const MetricsReport& r) { return r.avg_jsd; });
  out.avg_wd = mean([](const MetricsReport& r) { return r.avg_wd; });
  out.diff_corr = mean([](const MetricsReport& r) { return r.diff_corr; });
  for (const auto& r : runs) {
    if (!r.ml) continue;
    if (!out.ml) {
      out.ml.emplace();
      out.ml->task = r.ml->task;
    }
  }
  if (out.ml) {
    for (const auto& name : ml_metric_names(out.ml->task)) {
      const auto v = mean([&](const MetricsReport& r) -> std::optional<double> {
        if (!r.ml) return std::nullopt;
        const auto it = r.ml->deltas.find(name);
        if (it == r.ml->deltas.end()) return std::nullopt;
        return it->second;
      });
      if (v) out.ml->deltas[name] = *v;
    }
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (const auto& w : runs[i].warnings) out.warnings.push_back("run " + std::to_string(i) + ": " + w);
  }
  return out;
}

nlohmann::json report_to_json(const MetricsReport& report) {
  nlohmann::json j;
  auto put = [&](const char* key, const std::optional<double>& v) {
    j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  put("avg_jsd", report.avg_jsd);
  put("avg_wd", report.avg_wd);
  put("diff_corr", report.diff_corr);
  if (report.ml) {
    nlohmann::json ml;
    ml["task"] = to_string(report.ml->task);
    ml["deltas"] = nlohmann::json::object();
    for (const auto& [k, v] : report.ml->deltas) ml["deltas"][k] = v;
    ml["learners"] = nlohmann::json::array();
    for (const auto& s : report.ml->learners) {
      ml["learners"].push_back({{"learner", s.learner}, {"real", s.real}, {"synth", s.synth}, {"degenerate", s.degenerate}});
    }
    j["ml_utility"] = std::move(ml);
  }
  j["warnings"] = report.warnings;
  return j;
}

std::string format_report(const MetricsReport& report) {
  const auto values = report.values();
  std::size_t width = 6;
  for (const auto& [name, v] : values) width = std::max(width, name.size());
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  os << std::string(width - 6, ' ') << "metric  value\n";
  for (const auto& [name, v] : values) os << std::string(width - name.size(), ' ') << name << "  " << v << '\n';
  if (report.ml && !report.ml->learners.empty()) {
    os << '\n' << "learner";
    const auto names = ml_metric_names(report.ml->task);
    for (const auto& n : names) os << "  " << n << "(real/synth)";
    os << '\n';
    for (const auto& s : report.ml->learners) {
      os << s.learner << (s.degenerate ? " [degenerate]" : "");
      for (const auto& n : names) {
        const auto r = s.real.find(n), q = s.synth.find(n);
        os << "  ";
        if (r != s.real.end() && q != s.synth.end()) {
          os << r->second << '/' << q->second;
        } else {
          os << "n/a";
        }
      }
      os << '\n';
    }
  }
  for (const auto& w : report.warnings) os << "warning: " << w << '\n';
  return os.str();
}

}  // namespace fctgan

#include <set>
#include <sstream>

#include "fctgan/cli/cli.hpp"
#include "fctgan/evaluation/ml.hpp"

namespace fctgan::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw UsageError("unknown key '" + key + "' in " + where);
  }
}

std::string resolve(const json& j, const std::string& key, const fs::path& base) {
  const auto s = j.at(key).get<std::string>();
  if (s.empty() || base.empty() || fs::path(s).is_absolute()) return s;
  return (base / s).lexically_normal().string();
}

}  // namespace

RunConfig run_config_from_json(const json& j, const fs::path& base) {
  RunConfig c;
  try {
    check_keys(j,
               {"schema", "data", "split", "train", "out_dir", "checkpoint_every", "checkpoint_pattern", "sample",
                "eval", "permstudy"},
               "config");
    if (j.contains("schema")) c.schema = resolve(j, "schema", base);
    if (j.contains("data")) c.data = resolve(j, "data", base);
    if (j.contains("out_dir")) c.out_dir = resolve(j, "out_dir", base);
    if (j.contains("split")) {
      const auto& s = j["split"];
      check_keys(s, {"test_fraction", "seed"}, "split");
      c.test_fraction = s.value("test_fraction", c.test_fraction);
      if (s.contains("seed")) c.split_seed = s["seed"].get<std::uint64_t>();
    }
    if (j.contains("train")) c.train = train_config_from_json(j["train"]);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.checkpoint_pattern = j.value("checkpoint_pattern", c.checkpoint_pattern);
    if (j.contains("sample")) {
      const auto& s = j["sample"];
      check_keys(s, {"checkpoint", "n", "match_train_size", "condition", "output"}, "sample");
      if (s.contains("checkpoint")) c.checkpoint = resolve(s, "checkpoint", base);
      if (s.contains("output")) c.output = resolve(s, "output", base);
      c.n = s.value("n", c.n);
      c.match_train_size = s.value("match_train_size", c.match_train_size);
      c.condition = s.value("condition", c.condition);
    }
    if (j.contains("eval")) {
      const auto& s = j["eval"];
      check_keys(s, {"real", "synth", "test"}, "eval");
      if (s.contains("real")) c.real = resolve(s, "real", base);
      if (s.contains("synth")) c.synth = resolve(s, "synth", base);
      if (s.contains("test")) c.test = resolve(s, "test", base);
    }
    if (j.contains("permstudy")) {
      const auto& s = j["permstudy"];
      check_keys(s, {"orders", "runs"}, "permstudy");
      if (s.contains("orders")) {
        c.orders.clear();
        for (const auto& o : s["orders"]) c.orders.push_back(parse_column_order(o.get<std::string>()));
      }
      c.runs = s.value("runs", c.runs);
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (!(c.test_fraction > 0 && c.test_fraction < 1)) throw UsageError("split.test_fraction must lie in (0, 1)");
  if (c.runs == 0) throw UsageError("permstudy.runs must be at least 1");
  if (c.checkpoint_pattern.find("{epoch}") == std::string::npos) {
    throw UsageError("checkpoint_pattern must contain {epoch}");
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path.string()));
  } catch (const json::exception& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

json run_config_to_json(const RunConfig& c) {
  json j;
  j["schema"] = c.schema;
  j["data"] = c.data;
  j["split"] = {{"test_fraction", c.test_fraction}, {"seed", c.split_seed.value_or(c.train.seed)}};
  j["train"] = train_config_to_json(c.train);
  j["out_dir"] = c.out_dir;
  j["checkpoint_every"] = c.checkpoint_every;
  j["checkpoint_pattern"] = c.checkpoint_pattern;
  j["sample"] = {{"checkpoint", c.checkpoint},
                 {"n", c.n},
                 {"match_train_size", c.match_train_size},
                 {"condition", c.condition},
                 {"output", c.output}};
  j["eval"] = {{"real", c.real}, {"synth", c.synth}, {"test", c.test}};
  auto orders = json::array();
  for (auto o : c.orders) orders.push_back(to_string(o));
  j["permstudy"] = {{"orders", orders}, {"runs", c.runs}};
  return j;
}

Split split_dataset(const Table& table, const TableSchema& schema, double test_fraction, std::uint64_t seed) {
  const auto [train, test] = split_rows(table, schema, test_fraction, seed);
  return {table.select_rows(train), table.select_rows(test)};
}

std::string history_jsonl(const TrainHistory& history) {
  std::ostringstream os;
  for (const auto& r : history.steps) os << step_record_to_json(r).dump() << '\n';
  return os.str();
}

Table train_and_sample(const Table& train_rows, const TableSchema& schema, const TrainConfig& config) {
  const auto result = train(train_rows, schema, config);
  Rng rng(config.seed ^ 0x5a5a5a5aULL);
  return sample(result.model, train_rows.rows(), rng);
}

}  // namespace fctgan::cli

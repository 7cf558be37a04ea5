#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fctgan/evaluation/study.hpp"
#include "fctgan/training/trainer.hpp"

namespace fctgan::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericalFault = 3 };

/// Invalid command line or configuration values.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a command can read from a config document. Relative paths in
/// the document are resolved against the document's directory.
struct RunConfig {
  std::string schema;
  std::string data;
  double test_fraction = 0.2;
  std::optional<std::uint64_t> split_seed;  // defaults to train.seed
  TrainConfig train;
  std::string out_dir = ".";
  std::size_t checkpoint_every = 0;  // epochs; 0 disables periodic checkpoints
  std::string checkpoint_pattern = "checkpoint-epoch{epoch}.ckpt";

  // sample
  std::string checkpoint;
  std::size_t n = 0;
  bool match_train_size = false;
  std::string condition;  // "column=value"
  std::string output;

  // eval
  std::string real;
  std::string synth;
  std::string test;

  // permstudy
  std::vector<ColumnOrder> orders{ColumnOrder::original, ColumnOrder::by_type, ColumnOrder::by_correlation};
  std::size_t runs = 1;
};

/// Throws UsageError on unknown keys or bad values.
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json run_config_to_json(const RunConfig& c);

/// Train/test tables of a dataset split by `split_rows`.
struct Split {
  Table train;
  Table test;
};
Split split_dataset(const Table& table, const TableSchema& schema, double test_fraction, std::uint64_t seed);

/// JSON lines, one record per optimization step.
std::string history_jsonl(const TrainHistory& history);

/// Fits on `train` and samples as many rows; used by permstudy.
Table train_and_sample(const Table& train, const TableSchema& schema, const TrainConfig& config);

/// Runs the command line (argv[0] excluded). Output and diagnostics go to the
/// given streams; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fctgan::cli

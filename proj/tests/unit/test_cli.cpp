#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "fctgan/cli/cli.hpp"
#include "fctgan/evaluation/report.hpp"

using namespace fctgan;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kFixtures = FCTGAN_FIXTURE_DIR;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("fctgan_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) { return read_file(path); }

std::string write_config(const TempDir& dir, const std::string& data = kFixtures + "/small.csv") {
  json cfg = {{"schema", kFixtures + "/small.schema.json"},
              {"data", data},
              {"train",
               {{"epochs", 1},
                {"batch_size", 64},
                {"n_critic", 1},
                {"net", {{"noise_dim", 8}, {"c0", 16}, {"expansion", 2}, {"disc_dim", 8}, {"disc_blocks", 1}}}}}};
  const auto path = dir / "cfg.json";
  std::ofstream(path) << cfg.dump(2);
  return path;
}

std::size_t csv_rows(const std::string& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n - 1;
}

}  // namespace

TEST_CASE("usage errors exit 1, help exits 0") {
  CHECK(run_cli({}).code == cli::kUsage);
  CHECK(run_cli({"bogus"}).code == cli::kUsage);
  CHECK(run_cli({"--help"}).code == cli::kOk);
  CHECK(run_cli({"fit-train", "--no-such-flag"}).code == cli::kUsage);
  CHECK(run_cli({"fit-train"}).code == cli::kUsage);  // no schema
  CHECK(run_cli({"permstudy", "--orders", "sideways", "--schema", "x", "--data", "y"}).code == cli::kUsage);
  CHECK(run_cli({"fit-train", "--config", "/nonexistent/cfg.json"}).code != cli::kOk);

  TempDir dir("usage");
  std::ofstream(dir / "bad.json") << R"({"schema": "s.json", "unknown": 1})";
  const auto r = run_cli({"fit-train", "--config", dir / "bad.json"});
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("unknown") != std::string::npos);
}

TEST_CASE("config parsing resolves relative paths and rejects bad values") {
  const json j = {{"schema", "s.json"}, {"data", "/abs/d.csv"}, {"split", {{"test_fraction", 0.3}, {"seed", 5}}}};
  const auto c = cli::run_config_from_json(j, "/base/dir");
  CHECK(c.schema == "/base/dir/s.json");
  CHECK(c.data == "/abs/d.csv");
  CHECK(c.test_fraction == 0.3);
  CHECK(*c.split_seed == 5);
  CHECK_THROWS_AS(cli::run_config_from_json(json{{"split", {{"test_fraction", 1.5}}}}), cli::UsageError);
  CHECK_THROWS_AS(cli::run_config_from_json(json{{"checkpoint_pattern", "ckpt"}}), cli::UsageError);
  CHECK_THROWS_AS(cli::run_config_from_json(json{{"permstudy", {{"orders", {"nope"}}}}}), cli::UsageError);
  const auto round = cli::run_config_from_json(cli::run_config_to_json(c));
  CHECK(round.schema == c.schema);
  CHECK(round.test_fraction == c.test_fraction);
}

TEST_CASE("fit-train, sample, eval end to end with byte-identical reruns") {
  TempDir dir("e2e");
  const auto cfg = write_config(dir);
  fs::create_directories(dir / "a");
  fs::create_directories(dir / "b");

  auto fit = [&](const std::string& out) {
    return run_cli({"fit-train", "--config", cfg, "--seed", "3", "--out-dir", out}).code;
  };
  REQUIRE(fit(dir / "a") == cli::kOk);
  REQUIRE(fit(dir / "b") == cli::kOk);
  for (const char* name : {"model.ckpt", "history.jsonl", "run.json", "train.csv", "test.csv"}) {
    INFO(name);
    CHECK(fs::exists(dir / ("a/" + std::string(name))));
    CHECK(slurp(dir / ("a/" + std::string(name))) == slurp(dir / ("b/" + std::string(name))));
  }
  const auto run_json = json::parse(slurp(dir / "a/run.json"));
  const std::size_t train_rows = run_json.at("train_rows");
  CHECK(train_rows + run_json.at("test_rows").get<std::size_t>() == 200);
  CHECK_FALSE(slurp(dir / "a/history.jsonl").empty());

  auto sample = [&](const std::string& out, std::vector<std::string> extra = {}) {
    std::vector<std::string> args{"sample", "--checkpoint", dir / "a/model.ckpt", "--schema",
                                  kFixtures + "/small.schema.json", "--seed", "9", "--output", out};
    args.insert(args.end(), extra.begin(), extra.end());
    return run_cli(args).code;
  };
  REQUIRE(sample(dir / "s1.csv", {"--match-train-size"}) == cli::kOk);
  REQUIRE(sample(dir / "s2.csv", {"--match-train-size"}) == cli::kOk);
  CHECK(slurp(dir / "s1.csv") == slurp(dir / "s2.csv"));
  CHECK(csv_rows(dir / "s1.csv") == train_rows);
  const auto schema = load_schema(kFixtures + "/small.schema.json");
  CHECK(read_csv(dir / "s1.csv", schema).rows() == train_rows);

  CHECK(sample(dir / "s3.csv", {"-n", "17"}) == cli::kOk);
  CHECK(csv_rows(dir / "s3.csv") == 17);
  CHECK(sample(dir / "s4.csv") == cli::kUsage);  // no row count
  CHECK(sample(dir / "s5.csv", {"-n", "5", "--condition", "x=1"}) == cli::kUsage);
  CHECK(sample(dir / "s6.csv", {"-n", "5", "--condition", "group=w"}) == cli::kUsage);
  CHECK(sample(dir / "s7.csv", {"-n", "50", "--condition", "group=v"}) == cli::kOk);

  SUBCASE("schema hash mismatch is refused") {
    const auto r = run_cli({"sample", "--checkpoint", dir / "a/model.ckpt", "--schema",
                            kFixtures + "/bimodal.schema.json", "-n", "5", "--output", dir / "bad.csv"});
    CHECK(r.code == cli::kDataError);
    CHECK_FALSE(fs::exists(dir / "bad.csv"));
  }

  SUBCASE("eval matches the library and is zero against itself") {
    fs::create_directories(dir / "e1");
    fs::create_directories(dir / "e2");
    auto eval = [&](const std::string& synth, const std::string& out) {
      return run_cli({"eval", "--schema", kFixtures + "/small.schema.json", "--real", dir / "a/train.csv", "--synth",
                      synth, "--test", dir / "a/test.csv", "--seed", "4", "--out-dir", out})
          .code;
    };
    REQUIRE(eval(dir / "a/train.csv", dir / "e1") == cli::kOk);
    const auto self = json::parse(slurp(dir / "e1/metrics.json"));
    CHECK(self.at("avg_jsd").get<double>() == 0.0);
    CHECK(self.at("avg_wd").get<double>() == 0.0);
    CHECK(self.at("diff_corr").get<double>() == 0.0);

    REQUIRE(eval(dir / "s1.csv", dir / "e2") == cli::kOk);
    const auto files = slurp(dir / "e2/metrics.json");
    REQUIRE(eval(dir / "s1.csv", dir / "e2") == cli::kOk);
    CHECK(slurp(dir / "e2/metrics.json") == files);
    const auto lib = evaluate(read_csv(dir / "a/train.csv", schema), read_csv(dir / "s1.csv", schema), schema,
                              std::make_unique<Table>(read_csv(dir / "a/test.csv", schema)).get(), 4);
    CHECK(json::parse(files) == json::parse(report_to_json(lib).dump()));
  }
}

TEST_CASE("malformed CSV exits 2 and leaves no artifacts") {
  TempDir dir("malformed");
  auto text = slurp(kFixtures + "/small.csv");
  const auto third_line = text.find('\n', text.find('\n', text.find('\n') + 1) + 1);
  text.insert(third_line + 1, "0.5,u\n");  // short row at data row 3
  std::ofstream(dir / "bad.csv") << text;
  const auto cfg = write_config(dir, dir / "bad.csv");
  fs::create_directories(dir / "out");
  const auto r = run_cli({"fit-train", "--config", cfg, "--out-dir", dir / "out"});
  CHECK(r.code == cli::kDataError);
  CHECK(r.err.find("row") != std::string::npos);
  CHECK(fs::is_empty(dir / "out"));

  std::ofstream(dir / "bad_schema.json") << R"({"columns": [{"name": "x", "kind": "weird"}]})";
  CHECK(run_cli({"fit-train", "--schema", dir / "bad_schema.json", "--data", kFixtures + "/small.csv", "--out-dir",
                 dir / "out"})
            .code == cli::kDataError);
  CHECK(fs::is_empty(dir / "out"));
}

TEST_CASE("permstudy respects --orders and its MAV summary recomputes") {
  TempDir dir("perm");
  const auto cfg = write_config(dir);
  const auto r = run_cli({"permstudy", "--config", cfg, "--orders", "original,by_type", "--out-dir", dir.path.string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(fs::exists(dir / "permstudy-original.json"));
  CHECK(fs::exists(dir / "permstudy-by_type.json"));
  CHECK_FALSE(fs::exists(dir / "permstudy-by_correlation.json"));
  const auto a = json::parse(slurp(dir / "permstudy-original.json"));
  const auto b = json::parse(slurp(dir / "permstudy-by_type.json"));
  const auto mav_json = json::parse(slurp(dir / "mav.json"));
  REQUIRE(mav_json.size() >= 3);
  for (const auto& e : mav_json) {
    const std::string name = e.at("metric");
    auto pick = [&](const json& report) {
      if (name.rfind("ml.", 0) == 0) return report.at("ml_utility").at("deltas").at(name.substr(3)).get<double>();
      return report.at(name).get<double>();
    };
    const double x = pick(a), y = pick(b);
    CHECK(std::abs(e.at("mav").get<double>() - std::abs(x - y)) <= 1e-12);
    const double lo = std::min(x, y);
    if (lo != 0) {
      CHECK(std::abs(e.at("normalized_mav").get<double>() - std::abs(x - y) / lo * 100) <= 1e-12);
    } else {
      CHECK(e.at("normalized_mav").is_null());
    }
  }
}

TEST_CASE("gradcheck subcommand passes and writes its report") {
  TempDir dir("gc");
  const auto r = run_cli({"gradcheck", "--out-dir", dir.path.string()});
  CHECK(r.code == cli::kOk);
  const auto j = json::parse(slurp(dir / "gradcheck.json"));
  CHECK(j.size() > 20);
  for (const auto& e : j) CHECK(e.at("passed").get<bool>());
}

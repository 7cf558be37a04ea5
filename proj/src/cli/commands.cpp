#include <CLI11.hpp>

#include <chrono>
#include <iomanip>
#include <ostream>

#include "fctgan/cli/cli.hpp"
#include "fctgan/evaluation/report.hpp"
#include "fctgan/training/checkpoint.hpp"
#include "fctgan/training/gradcheck_suite.hpp"

namespace fctgan::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool fp64 = false;
  std::string schema, data, checkpoint, condition, output, real, synth, test, orders;
  std::size_t epochs = 0, n = 0, runs = 0;
  double test_fraction = 0;
  bool match_train_size = false;
  CLI::App* active = nullptr;

  bool given(const std::string& name) const {
    const auto* opt = active ? active->get_option_no_throw(name) : nullptr;
    return opt && opt->count() > 0;
  }
};

RunConfig resolve_config(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_run_config(f.config);
  if (f.given("--seed")) c.train.seed = f.seed;
  if (!f.out_dir.empty()) c.out_dir = f.out_dir;
  if (f.fp64) c.train.fp64 = true;
  auto set = [](std::string& dst, const std::string& src) {
    if (!src.empty()) dst = src;
  };
  set(c.schema, f.schema);
  set(c.data, f.data);
  set(c.checkpoint, f.checkpoint);
  set(c.condition, f.condition);
  set(c.output, f.output);
  set(c.real, f.real);
  set(c.synth, f.synth);
  set(c.test, f.test);
  if (f.given("--epochs")) c.train.epochs = f.epochs;
  if (f.given("--rows")) c.n = f.n;
  if (f.given("--runs")) {
    if (f.runs == 0) throw UsageError("--runs must be at least 1");
    c.runs = f.runs;
  }
  if (f.given("--test-fraction")) {
    if (!(f.test_fraction > 0 && f.test_fraction < 1)) throw UsageError("--test-fraction must lie in (0, 1)");
    c.test_fraction = f.test_fraction;
  }
  if (f.match_train_size) c.match_train_size = true;
  if (!f.orders.empty()) {
    c.orders.clear();
    std::stringstream ss(f.orders);
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        c.orders.push_back(parse_column_order(item));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
  }
  return c;
}

void require(const std::string& value, const char* what) {
  if (value.empty()) throw UsageError(std::string("missing ") + what);
}

fs::path out_path(const RunConfig& c, const std::string& name) { return fs::path(c.out_dir) / name; }

void write_json(const fs::path& path, const json& j) { write_file_atomic(path.string(), j.dump(2) + "\n"); }

std::string checkpoint_name(const std::string& pattern, std::size_t epoch) {
  std::string out = pattern;
  const auto pos = out.find("{epoch}");
  out.replace(pos, 7, std::to_string(epoch));
  return out;
}

int cmd_fit_train(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require(c.schema, "schema (--schema or config 'schema')");
  require(c.data, "data (--data or config 'data')");
  const auto schema = load_schema(c.schema);
  const auto table = read_csv(c.data, schema);
  const auto split = split_dataset(table, schema, c.test_fraction, c.split_seed.value_or(c.train.seed));
  const auto start = std::chrono::steady_clock::now();
  TrainHooks hooks;
  hooks.on_epoch = [&](std::size_t epoch, const AnyModel& model) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "epoch " << epoch << "/" << c.train.epochs << "  " << std::fixed << std::setprecision(1) << secs << "s\n";
    if (c.checkpoint_every > 0 && epoch % c.checkpoint_every == 0) {
      save_checkpoint(out_path(c, checkpoint_name(c.checkpoint_pattern, epoch)), model);
    }
  };
  const auto result = train(split.train, schema, c.train, hooks);
  write_csv(out_path(c, "train.csv").string(), split.train, schema);
  write_csv(out_path(c, "test.csv").string(), split.test, schema);
  write_file_atomic(out_path(c, "history.jsonl").string(), history_jsonl(result.history));
  json run;
  run["schema"] = c.schema;
  run["data"] = c.data;
  run["split"] = {{"test_fraction", c.test_fraction}, {"seed", c.split_seed.value_or(c.train.seed)}};
  run["train"] = train_config_to_json(c.train);
  run["schema_hash"] = schema_hash(schema);
  run["train_rows"] = split.train.rows();
  run["test_rows"] = split.test.rows();
  write_json(out_path(c, "run.json"), run);
  save_checkpoint(out_path(c, "model.ckpt"), result.model);
  out << "trained " << c.train.epochs << " epochs on " << split.train.rows() << " rows ("
      << split.test.rows() << " held out); wrote " << out_path(c, "model.ckpt").string() << "\n";
  return kOk;
}

std::optional<CondVector> parse_condition(const std::string& text, const AnyModel& model) {
  if (text.empty()) return std::nullopt;
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("--condition expects column=value");
  const auto name = text.substr(0, eq), value = text.substr(eq + 1);
  const auto& schema = model_transformer(model).schema();
  const auto col = schema.find(name);
  if (!col) throw UsageError("--condition: no column '" + name + "'");
  const auto& spec = schema[*col];
  if (!spec.is_categorical()) throw UsageError("--condition: column '" + name + "' is not categorical");
  const auto it = std::find(spec.vocabulary.begin(), spec.vocabulary.end(), value);
  if (it == spec.vocabulary.end()) throw UsageError("--condition: '" + value + "' is not in the vocabulary of '" + name + "'");
  const auto& sampler = model_sampler(model);
  if (!sampler.enabled()) throw UsageError("--condition: the model was trained without conditioning");
  return sampler.fixed(*col, static_cast<std::size_t>(it - spec.vocabulary.begin()));
}

int cmd_sample(const RunConfig& c, std::ostream& out) {
  require(c.checkpoint, "checkpoint (--checkpoint or config 'sample.checkpoint')");
  std::optional<std::uint64_t> expected;
  if (!c.schema.empty()) expected = schema_hash(load_schema(c.schema));
  const auto model = load_checkpoint(c.checkpoint, expected);
  const std::size_t n = c.match_train_size ? model_train_rows(model) : c.n;
  if (n == 0) throw UsageError("nothing to sample: pass -n or --match-train-size");
  Rng rng(c.train.seed);
  const auto table = sample(model, n, rng, parse_condition(c.condition, model));
  const auto path = c.output.empty() ? out_path(c, "synthetic.csv") : fs::path(c.output);
  write_csv(path.string(), table, model_transformer(model).schema());
  out << "wrote " << n << " rows to " << path.string() << "\n";
  return kOk;
}

int cmd_eval(const RunConfig& c, std::ostream& out) {
  require(c.schema, "schema (--schema or config 'schema')");
  require(c.real, "real table (--real or config 'eval.real')");
  require(c.synth, "synthetic table (--synth or config 'eval.synth')");
  const auto schema = load_schema(c.schema);
  const auto real = read_csv(c.real, schema);
  const auto synth = read_csv(c.synth, schema);
  std::optional<Table> test;
  if (!c.test.empty()) test = read_csv(c.test, schema);
  const auto report = evaluate(real, synth, schema, test ? &*test : nullptr, c.train.seed);
  write_json(out_path(c, "metrics.json"), report_to_json(report));
  const auto text = format_report(report);
  write_file_atomic(out_path(c, "metrics.txt").string(), text);
  out << text;
  return kOk;
}

int cmd_permstudy(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require(c.schema, "schema (--schema or config 'schema')");
  require(c.data, "data (--data or config 'data')");
  if (c.orders.empty()) throw UsageError("no column orders selected");
  const auto schema = load_schema(c.schema);
  const auto table = read_csv(c.data, schema);
  const auto split = split_dataset(table, schema, c.test_fraction, c.split_seed.value_or(c.train.seed));
  PermStudyConfig study;
  study.orders = c.orders;
  study.runs = c.runs;
  study.seed = c.train.seed;
  const auto start = std::chrono::steady_clock::now();
  const Synthesizer synthesize = [&](const Table& train_rows, const TableSchema& s, std::uint64_t seed) {
    TrainConfig tc = c.train;
    tc.seed = seed;
    auto synth = train_and_sample(train_rows, s, tc);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "permstudy: trained seed " << seed << "  " << std::fixed << std::setprecision(1) << secs << "s\n";
    return synth;
  };
  const auto report = perm_study(split.train, &split.test, schema, synthesize, study);
  for (const auto& o : report.orders) {
    auto j = report_to_json(o.report);
    j["order"] = to_string(o.order);
    j["permutation"] = o.permutation;
    write_json(out_path(c, std::string("permstudy-") + to_string(o.order) + ".json"), j);
  }
  write_json(out_path(c, "mav.json"), mav_to_json(report.mav));
  const auto text = format_mav(report.mav);
  write_file_atomic(out_path(c, "mav.txt").string(), text);
  out << text;
  return kOk;
}

int cmd_gradcheck(const Flags& f, std::ostream& out) {
  const auto results = full_gradcheck_suite(f.given("--seed") ? f.seed : 7);
  bool ok = true;
  json j = json::array();
  std::size_t width = 4;
  for (const auto& r : results) width = std::max(width, r.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "name" << "  max_rel_error  tolerance  status\n";
  for (const auto& r : results) {
    ok = ok && r.passed();
    out << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << std::scientific << std::setprecision(3)
        << r.max_rel_error << "      " << r.tolerance << "  " << (r.passed() ? "ok" : "FAIL") << "\n";
    j.push_back({{"name", r.name}, {"max_rel_error", r.max_rel_error}, {"tolerance", r.tolerance},
                 {"points", r.points}, {"passed", r.passed()}});
  }
  if (!f.out_dir.empty()) write_json(fs::path(f.out_dir) / "gradcheck.json", j);
  return ok ? kOk : kNumericalFault;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"FCT-GAN tabular synthesizer"};
  app.name("fctgan");
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON run configuration");
    sub->add_option("--seed", f.seed, "Random seed (overrides train.seed)");
    sub->add_option("--out-dir", f.out_dir, "Output directory");
    sub->add_flag("--fp64", f.fp64, "Train in double precision");
  };

  auto* fit = app.add_subcommand("fit-train", "Split the data, fit encoders, train, write a checkpoint");
  common(fit);
  fit->add_option("--schema", f.schema, "Schema JSON");
  fit->add_option("--data", f.data, "Data CSV");
  fit->add_option("--epochs", f.epochs, "Training epochs");
  fit->add_option("--test-fraction", f.test_fraction, "Held-out fraction");

  auto* smp = app.add_subcommand("sample", "Decode synthetic rows from a checkpoint");
  common(smp);
  smp->add_option("--checkpoint", f.checkpoint, "Checkpoint file");
  smp->add_option("--schema", f.schema, "Schema JSON; when given, its hash must match the checkpoint");
  smp->add_option("-n,--rows", f.n, "Number of rows");
  smp->add_flag("--match-train-size", f.match_train_size, "Sample as many rows as the training split");
  smp->add_option("--condition", f.condition, "Fix a category for every row: column=value");
  smp->add_option("--output", f.output, "Output CSV (default <out-dir>/synthetic.csv)");

  auto* ev = app.add_subcommand("eval", "Statistical similarity and ML utility of a synthetic table");
  common(ev);
  ev->add_option("--schema", f.schema, "Schema JSON");
  ev->add_option("--real", f.real, "Real training CSV");
  ev->add_option("--synth", f.synth, "Synthetic CSV");
  ev->add_option("--test", f.test, "Held-out CSV for ML utility");

  auto* perm = app.add_subcommand("permstudy", "Column-order stability study");
  common(perm);
  perm->add_option("--schema", f.schema, "Schema JSON");
  perm->add_option("--data", f.data, "Data CSV");
  perm->add_option("--orders", f.orders, "Comma-separated subset of original,by_type,by_correlation");
  perm->add_option("--runs", f.runs, "Seeds per order");
  perm->add_option("--epochs", f.epochs, "Training epochs");
  perm->add_option("--test-fraction", f.test_fraction, "Held-out fraction");

  auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  gc->add_option("--seed", f.seed, "Random seed");
  gc->add_option("--out-dir", f.out_dir, "Write gradcheck.json here");

  std::vector<const char*> argv{"fctgan"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "fctgan: " << e.what() << "\n";
    for (auto* sub : app.get_subcommands()) {
      err << sub->help();
      return kUsage;
    }
    err << app.help();
    return kUsage;
  }

  for (auto* sub : {fit, smp, ev, perm, gc}) {
    if (sub->parsed()) f.active = sub;
  }
  try {
    if (gc->parsed()) return cmd_gradcheck(f, out);
    const RunConfig c = resolve_config(f);
    if (fit->parsed()) return cmd_fit_train(c, out, err);
    if (smp->parsed()) return cmd_sample(c, out);
    if (ev->parsed()) return cmd_eval(c, out);
    if (perm->parsed()) return cmd_permstudy(c, out, err);
  } catch (const UsageError& e) {
    err << "fctgan: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalFault& e) {
    err << "fctgan: numerical fault: " << e.what() << "\n";
    return kNumericalFault;
  } catch (const SchemaError& e) {
    err << "fctgan: schema error: " << e.what() << "\n";
    return kDataError;
  } catch (const DataError& e) {
    err << "fctgan: data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "fctgan: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace fctgan::cli

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fctgan/numerics/gradcheck.hpp"
#include "fctgan/training/checkpoint.hpp"
#include "fctgan/training/losses.hpp"
#include "fctgan/training/trainer.hpp"

using namespace fctgan;
using TD = Tensor<double>;

namespace {

const std::string kFixtures = FCTGAN_FIXTURE_DIR;

struct Fixture {
  TableSchema schema;
  Table table;
};

Fixture load(const std::string& name) {
  Fixture f;
  f.schema = load_schema(kFixtures + "/" + name + ".schema.json");
  f.table = read_csv(kFixtures + "/" + name + ".csv", f.schema);
  return f;
}

TrainConfig tiny_train_config(std::uint64_t seed) {
  TrainConfig c;
  c.seed = seed;
  c.fp64 = true;
  c.batch_size = 32;
  c.n_critic = 1;
  c.net.noise_dim = 8;
  c.net.c0 = 16;
  c.net.expansion = 2;
  c.net.disc_dim = 8;
  c.net.disc_blocks = 2;
  c.net.aux_hidden = 16;
  return c;
}

// Critic sum_j tanh(x W + b)_j v_j per row.
struct MlpCritic {
  TD w, b, v;
  TD operator()(const TD& x) const {
    return ops::matmul(ops::tanh(ops::add_bcast(ops::matmul(x, w), b)), v);
  }
};

double median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[1];
}

}  // namespace

TEST_CASE("gradient penalty of trivial critics") {
  Rng rng(1);
  const auto real = random_tensor({6, 4}, rng), fake = random_tensor({6, 4}, rng);
  std::vector<double> eps(6);
  for (auto& e : eps) e = rng.uniform();

  // Unit-norm linear critic.
  const TD w({4, 1}, {0.5, -0.5, 0.5, 0.5});
  const CriticFn<double> linear = [&](const TD& x) { return ops::matmul(x, w); };
  CHECK(gradient_penalty(linear, real, fake, eps, nullptr).item() <= 1e-12);

  const CriticFn<double> zero = [&](const TD& x) { return ops::scale(ops::matmul(x, w), 0.0); };
  CHECK(gradient_penalty(zero, real, fake, eps, nullptr).item() == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("gradient penalty matches per-sample replay") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const MlpCritic c{random_tensor({5, 7}, rng), random_tensor({7}, rng), random_tensor({7, 1}, rng)};
    const auto real = random_tensor({8, 5}, rng, -2, 2), fake = random_tensor({8, 5}, rng, -2, 2);
    std::vector<double> eps(8);
    for (auto& e : eps) e = rng.uniform();
    const CriticFn<double> critic = [&](const TD& x) { return c(x); };
    const double gp = gradient_penalty(critic, real, fake, eps, nullptr).item();

    double expect = 0;
    for (std::size_t r = 0; r < 8; ++r) {
      std::vector<double> row(5);
      for (std::size_t j = 0; j < 5; ++j) row[j] = eps[r] * real[r * 5 + j] + (1 - eps[r]) * fake[r * 5 + j];
      Tape<double> tape;
      const auto x = tape.watch(TD({1, 5}, row));
      const auto g = *tape.backward(ops::sum_all(c(x))).of(x);
      double ss = 0;
      for (double v : g.data()) ss += v * v;
      expect += (std::sqrt(ss) - 1) * (std::sqrt(ss) - 1) / 8;
    }
    CHECK(std::abs(gp - expect) <= 1e-9);
  }
}

TEST_CASE("gradient penalty is symmetric at eps = 0.5") {
  Rng rng(2);
  const MlpCritic c{random_tensor({3, 4}, rng), random_tensor({4}, rng), random_tensor({4, 1}, rng)};
  const CriticFn<double> critic = [&](const TD& x) { return c(x); };
  const auto a = random_tensor({5, 3}, rng), b = random_tensor({5, 3}, rng);
  const std::vector<double> half(5, 0.5);
  CHECK(gradient_penalty(critic, a, b, half, nullptr).item() == gradient_penalty(critic, b, a, half, nullptr).item());
}

TEST_CASE("gradient penalty path gradient with respect to critic parameters") {
  GanConfig cfg;
  cfg.disc_dim = 4;
  cfg.disc_kernel = 4;
  cfg.disc_blocks = 1;
  cfg.expansion = 2;
  const auto plan = plan_resolution(15, 5);
  Rng rng(3);
  auto d = Discriminator<double>::init(plan, cfg, rng);
  const auto real = random_tensor({3, 15}, rng), fake = random_tensor({3, 15}, rng);
  const auto cond = random_tensor({3, 5}, rng);
  const std::vector<double> eps{0.2, 0.5, 0.9};
  std::vector<TD> inputs;
  for (auto* p : d.parameters()) inputs.push_back(*p);
  const auto r = check_gradient(
      "gradient_penalty",
      [&](const std::vector<TD>& v) {
        auto live = d;
        auto ps = live.parameters();
        for (std::size_t i = 0; i < ps.size(); ++i) *ps[i] = v[i];
        Rng drop(4);
        const CriticFn<double> critic = [&](const TD& x) { return live.forward(x, cond, cfg, true, drop); };
        return gradient_penalty(critic, real, fake, eps, v[0].tape());
      },
      inputs, rng);
  CHECK(r.max_rel_error <= 1e-4);
}

TEST_CASE("info loss") {
  Rng rng(5);
  const auto real = random_tensor({10, 6}, rng);
  CHECK(info_loss(real, real).item() == 0.0);
  const auto shifted = ops::add_const(real, 1.0);
  CHECK(info_loss(real, shifted).item() == doctest::Approx(std::sqrt(6.0)).epsilon(1e-12));
  CHECK_THROWS(info_loss(random_tensor({1, 6}, rng), random_tensor({1, 6}, rng)));

  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_tensor({9, 4}, rng, -3, 3), b = random_tensor({9, 4}, rng, -1, 2);
    // Two-pass moments.
    double mean_term = 0, std_term = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      double ma = 0, mb = 0;
      for (std::size_t r = 0; r < 9; ++r) {
        ma += a[r * 4 + j] / 9;
        mb += b[r * 4 + j] / 9;
      }
      double va = 0, vb = 0;
      for (std::size_t r = 0; r < 9; ++r) {
        va += (a[r * 4 + j] - ma) * (a[r * 4 + j] - ma) / 8;
        vb += (b[r * 4 + j] - mb) * (b[r * 4 + j] - mb) / 8;
      }
      mean_term += (ma - mb) * (ma - mb);
      std_term += (std::sqrt(va) - std::sqrt(vb)) * (std::sqrt(va) - std::sqrt(vb));
    }
    CHECK(std::abs(info_loss(a, b).item() - (std::sqrt(mean_term) + std::sqrt(std_term))) <= 1e-8);
  }
}

TEST_CASE("cond loss") {
  ColumnCodec cat;
  cat.spec.name = "c";
  cat.spec.kind = ColumnKind::categorical;
  cat.spec.vocabulary = {"a", "b", "c", "d"};
  ColumnCodec mm;
  mm.spec.name = "m";
  mm.spec.kind = ColumnKind::minmax;
  const auto layout = build_layout({cat, mm});
  const CondVector cv{0, 2, 2};

  CHECK(cond_loss(TD({1, 5}, {0, 0, 1, 0, 0.3}), {cv}, layout).item() <= 1e-6);
  CHECK(cond_loss(TD({1, 5}, {0.25, 0.25, 0.25, 0.25, 0}), {cv}, layout).item() ==
        doctest::Approx(std::log(4.0)).epsilon(1e-9));

  Rng rng(6);
  std::vector<double> rows;
  std::vector<CondVector> conds;
  double expect = 0;
  for (std::size_t r = 0; r < 7; ++r) {
    std::vector<double> p(4);
    double s = 0;
    for (auto& v : p) s += (v = rng.uniform(0.05, 1));
    for (auto& v : p) v /= s;
    const std::size_t k = rng.index(4);
    conds.push_back({0, k, k});
    rows.insert(rows.end(), p.begin(), p.end());
    rows.push_back(0);
    const double single = cond_loss(TD({1, 5}, {p[0], p[1], p[2], p[3], 0}), {conds.back()}, layout).item();
    CHECK(single == doctest::Approx(-std::log(p[k])).epsilon(1e-9));
    expect += single / 7;
  }
  CHECK(cond_loss(TD({7, 5}, rows), conds, layout).item() == doctest::Approx(expect).epsilon(1e-9));
  CHECK_THROWS(cond_loss(TD({1, 5}, {0, 0, 1, 0, 0}), {CondVector{1, 0, 0}}, layout));
}

TEST_CASE("downstream loss") {
  auto f = load("small");
  Rng rng(7);
  const auto tr = DataTransformer::fit(f.table, f.schema, VgmOptions{}, rng);
  const auto layout = make_aux_layout(tr);
  REQUIRE(layout.task == Task::regression);
  GanConfig cfg;
  cfg.aux_hidden = 6;
  const auto aux = AuxPredictor<double>::init(layout.feature_width, 1, cfg, rng);
  const auto enc = tr.encode(f.table, rng);
  const TD rows({enc.rows, enc.cols}, enc.data);
  const auto pred = aux.forward(aux_features(rows, layout));
  const auto target = aux_target(rows, layout);
  double expect = 0;
  for (std::size_t r = 0; r < enc.rows; ++r) expect += (pred[r] - target[r]) * (pred[r] - target[r]) / enc.rows;
  CHECK(std::abs(downstream_loss(rows, aux, layout).item() - expect) <= 1e-9);

  // A classifier that is certain of each row's own class.
  auto g = load("bimodal");
  const auto tb = DataTransformer::fit(g.table, g.schema, VgmOptions{}, rng);
  const auto cl = make_aux_layout(tb);
  auto sure = AuxPredictor<double>::init(cl.feature_width, 2, cfg, rng);
  sure.out.w = TD::zeros(sure.out.w.shape());
  sure.out.b = TD({2}, {60.0, 0.0});
  const auto eb = tb.encode(g.table.select_rows({0}), rng);
  std::vector<double> row = eb.data;
  const auto cat = tb.layout().columns[1].onehot();
  row[cat->offset] = 1;
  row[cat->offset + 1] = 0;
  CHECK(downstream_loss(TD({1, eb.cols}, row), sure, cl).item() <= 1e-12);
}

TEST_CASE("schema without target trains without the downstream term") {
  auto f = load("bimodal");
  f.schema.columns[1].target = false;
  f.schema.columns[1].task = Task::none;
  auto c = tiny_train_config(1);
  Rng rng(1);
  Matrix enc;
  auto m = init_model<double>(f.table, f.schema, c, rng, &enc);
  CHECK_FALSE(m.aux.has_value());
  const auto s = g_step(m, draw_batch(m, enc, 32, rng), rng);
  CHECK(s.downstream == 0.0);
  CHECK(s.aux_loss == 0.0);
}

TEST_CASE("critic step with a zero critic and no penalty") {
  auto f = load("bimodal");
  auto c = tiny_train_config(2);
  c.lambda_gp = 0;
  Rng rng(2);
  Matrix enc;
  auto m = init_model<double>(f.table, f.schema, c, rng, &enc);
  m.d.head.w = TD::zeros(m.d.head.w.shape());
  m.d.head.b = TD::zeros(m.d.head.b.shape());
  CHECK(d_step(m, draw_batch(m, enc, 32, rng), rng).d_loss == 0.0);
}

TEST_CASE("identical real and fake batches leave only the penalty") {
  auto f = load("bimodal");
  auto c = tiny_train_config(3);
  Rng rng(3);
  Matrix enc;
  auto m = init_model<double>(f.table, f.schema, c, rng, &enc);
  const auto batch = draw_batch(m, enc, 16, rng);
  const CriticFn<double> critic = [&](const TD& x) { return m.d.forward(x, batch.cond, c.net, false, rng); };
  const auto w = ops::sub(ops::mean_all(critic(batch.real)), ops::mean_all(critic(batch.real))).item();
  CHECK(w == 0.0);
  std::vector<double> eps(16, 0.3);
  const double gp = gradient_penalty(critic, batch.real, batch.real, eps, nullptr).item();
  CHECK(w + c.lambda_gp * gp == c.lambda_gp * gp);
  CHECK(gp > 0.0);
}

TEST_CASE("critic loss falls over 50 steps") {
  auto f = load("bimodal");
  std::vector<double> drops;
  for (std::uint64_t seed : {11, 12, 13}) {
    auto c = tiny_train_config(seed);
    Rng rng(seed);
    Matrix enc;
    auto m = init_model<double>(f.table, f.schema, c, rng, &enc);
    std::vector<double> loss;
    for (int i = 0; i < 50; ++i) loss.push_back(d_step(m, draw_batch(m, enc, 32, rng), rng).d_loss);
    double first = 0, last = 0;
    for (int i = 0; i < 5; ++i) {
      first += loss[i] / 5;
      last += loss[45 + i] / 5;
    }
    drops.push_back(first - last);
  }
  CHECK(median3(drops) > 0);
}

TEST_CASE("generator step bookkeeping and component replay") {
  auto f = load("bimodal");
  auto c = tiny_train_config(4);
  c.w_down = 0.7;
  c.w_info = 1.3;
  c.w_cond = 0.4;
  Rng rng(4);
  Matrix enc;
  auto m = init_model<double>(f.table, f.schema, c, rng, &enc);
  const auto batch = draw_batch(m, enc, 32, rng);
  const auto before = m;
  Rng replay = rng;
  const auto s = g_step(m, batch, rng);
  CHECK(std::abs(s.g_loss - (s.adversarial + c.w_down * s.downstream + c.w_info * s.info + c.w_cond * s.cond)) <=
        1e-6);

  std::vector<double> z(32 * c.net.noise_dim);
  for (auto& v : z) v = replay.normal();
  const auto& layout = before.transformer.layout();
  const auto fake = apply_output_activations(
      before.g.forward(TD({32, c.net.noise_dim}, z), batch.cond, c.net, true, replay), layout, c.net.tau, replay);
  const double adv = -ops::mean_all(before.d.forward(fake, batch.cond, c.net, true, replay)).item();
  CHECK(s.adversarial == doctest::Approx(adv).epsilon(1e-12));
  CHECK(s.info == doctest::Approx(info_loss(batch.real, fake).item()).epsilon(1e-12));
  CHECK(s.cond == doctest::Approx(cond_loss(fake, batch.conds, layout).item()).epsilon(1e-12));
  CHECK(s.downstream == doctest::Approx(downstream_loss(fake, *before.aux, *before.aux_layout).item()).epsilon(1e-12));
}

TEST_CASE("zero auxiliary weights give the plain generator objective") {
  auto f = load("bimodal");
  auto c = tiny_train_config(5);
  c.w_down = c.w_info = c.w_cond = 0;
  Rng rng(5);
  Matrix enc;
  auto m = init_model<double>(f.table, f.schema, c, rng, &enc);
  const auto s = g_step(m, draw_batch(m, enc, 32, rng), rng);
  CHECK(s.g_loss == s.adversarial);
}

TEST_CASE("conditioning loss is learned within 300 steps") {
  auto f = load("bimodal");
  std::vector<double> tails;
  for (std::uint64_t seed : {21, 22, 23}) {
    auto c = tiny_train_config(seed);
    c.epochs = 5;  // 63 iterations per epoch at batch 32
    c.lr_g = c.lr_d = 1e-3;
    std::vector<double> cond;
    train(f.table, f.schema, c, {[&](const StepRecord& r) { cond.push_back(r.cond); }, {}});
    REQUIRE(cond.size() >= 300);
    double tail = 0;
    for (std::size_t i = 280; i < 300; ++i) tail += cond[i] / 20;
    tails.push_back(tail);
  }
  CHECK(median3(tails) < std::log(2.0) / 2);
}

TEST_CASE("zero epochs returns the initialized model") {
  auto f = load("small");
  auto c = tiny_train_config(6);
  c.epochs = 0;
  const auto r = train(f.table, f.schema, c);
  CHECK(r.history.steps.empty());
  const auto& m = std::get<Model<double>>(r.model);
  CHECK(m.step == 0);
  CHECK(m.train_rows == 200);
}

TEST_CASE("training is deterministic for a seed") {
  auto f = load("small");
  auto c = tiny_train_config(7);
  c.epochs = 2;
  const auto a = train(f.table, f.schema, c);
  const auto b = train(f.table, f.schema, c);
  REQUIRE(a.history.steps.size() == b.history.steps.size());
  for (std::size_t i = 0; i < a.history.steps.size(); ++i) {
    CHECK(step_record_to_json(a.history.steps[i]).dump() == step_record_to_json(b.history.steps[i]).dump());
  }
  CHECK(encode_checkpoint(a.model) == encode_checkpoint(b.model));
}

TEST_CASE("sampling") {
  auto f = load("mixed");
  auto c = tiny_train_config(8);
  c.epochs = 0;
  const auto r = train(f.table, f.schema, c);
  Rng rng(8);
  const auto empty = sample(r.model, 0, rng);
  CHECK(empty.cols() == f.schema.columns.size());
  CHECK(empty.rows() == 0);
  const auto t = sample(r.model, 300, rng);
  CHECK(t.rows() == 300);
  for (std::size_t j = 0; j < f.schema.columns.size(); ++j) {
    if (!f.schema.columns[j].is_categorical()) continue;
    for (double v : t.columns[j]) {
      CHECK(v >= 0);
      CHECK(v < static_cast<double>(f.schema.columns[j].vocabulary.size()));
      CHECK(v == std::floor(v));
    }
  }
}

TEST_CASE("checkpoint round trip") {
  auto f = load("small");
  auto c = tiny_train_config(9);
  c.fp64 = false;
  c.epochs = 1;
  const auto r = train(f.table, f.schema, c);
  const auto bytes = encode_checkpoint(r.model);
  CHECK(bytes.compare(0, 8, "FCTGANCK") == 0);
  const auto back = decode_checkpoint(bytes, schema_hash(f.schema));
  CHECK(std::holds_alternative<Model<float>>(back));
  CHECK(encode_checkpoint(back) == bytes);
  Rng r1(3), r2(3);
  const auto s1 = sample(r.model, 50, r1), s2 = sample(back, 50, r2);
  CHECK(s1.columns == s2.columns);

  auto other = f.schema;
  other.columns[1].vocabulary = {"v", "u"};
  CHECK_THROWS_AS(decode_checkpoint(bytes, schema_hash(other)), CheckpointError);
  CHECK_THROWS_AS(decode_checkpoint("NOTACKPT" + bytes.substr(8)), CheckpointError);
  CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() / 2)), CheckpointError);
  auto future = bytes;
  future[8] = 9;
  CHECK_THROWS_AS(decode_checkpoint(future), CheckpointError);
}

TEST_CASE("train config JSON") {
  TrainConfig c;
  c.epochs = 7;
  c.net.disc_dim = 32;
  c.vgm.max_modes = 3;
  const auto back = train_config_from_json(train_config_to_json(c));
  CHECK(train_config_to_json(back) == train_config_to_json(c));
  CHECK(train_config_from_json(nlohmann::json::object()).batch_size == 256);
  CHECK_THROWS(train_config_from_json({{"n_critic", 0}}));
  CHECK_THROWS(train_config_from_json({{"lr_g", -1.0}}));
}

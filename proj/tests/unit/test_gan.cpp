#include <doctest.h>

#include <cmath>

#include "fctgan/gan/networks.hpp"
#include "fctgan/numerics/gradcheck.hpp"

using namespace fctgan;
using TD = Tensor<double>;

namespace {

GanConfig tiny_config() {
  GanConfig c;
  c.noise_dim = 6;
  c.c0 = 16;
  c.expansion = 2;
  c.disc_dim = 4;
  c.disc_kernel = 4;
  c.disc_blocks = 2;
  c.aux_hidden = 5;
  return c;
}

EncodedLayout toy_layout() {
  // alpha, 3 modes, 2 categories, minmax scalar.
  ColumnCodec cont;
  cont.spec.name = "x";
  cont.spec.kind = ColumnKind::continuous;
  cont.vgm = VgmParams{{0.2, 0.3, 0.5}, {-1, 0, 1}, {1, 1, 1}};
  ColumnCodec cat;
  cat.spec.name = "c";
  cat.spec.kind = ColumnKind::categorical;
  cat.spec.vocabulary = {"a", "b"};
  ColumnCodec mm;
  mm.spec.name = "m";
  mm.spec.kind = ColumnKind::minmax;
  return build_layout({cont, cat, mm});
}

}  // namespace

TEST_CASE("plan_resolution") {
  const auto p = plan_resolution(376, 343);
  CHECK(p.side == 32);
  CHECK(p.stages == 3);
  CHECK(p.gen_pad == 1024 - 376);
  CHECK(p.disc_pad == 1024 - 719);
  CHECK(plan_resolution(16, 0).side == 4);
  CHECK(plan_resolution(16, 0).disc_pad == 0);
  // Exhaustive oracle: smallest R in {4, 8, 16, ...} with R^2 >= need.
  for (std::size_t d_enc = 1; d_enc < 300; d_enc += 7) {
    for (std::size_t d_cv = 0; d_cv < 300; d_cv += 11) {
      std::size_t r = 4;
      while (r * r < d_enc + d_cv) r *= 2;
      CHECK(plan_resolution(d_enc, d_cv).side == r);
    }
  }
  CHECK(plan_resolution(15, 5).side == 8);
  CHECK_THROWS(plan_resolution(0, 3));
}

TEST_CASE("default generator stage shapes") {
  const auto plan = plan_resolution(376, 343);
  Rng rng(1);
  GanConfig cfg;
  const auto g = Generator<float>::init(plan, cfg, rng);
  CHECK(g.c0 == 256);
  std::vector<Shape> trace;
  const auto out = g.forward(Tensor<float>::zeros({1, 100}), Tensor<float>::zeros({1, 343}), cfg, false, rng, &trace);
  const std::vector<Shape> expect{{1, 4, 4, 256}, {1, 8, 8, 64}, {1, 16, 16, 16}, {1, 32, 32, 4}, {1, 32, 32, 1}, {1, 376}};
  CHECK(trace == expect);
  CHECK(out.shape() == Shape{1, 376});
}

TEST_CASE("default discriminator token grid") {
  const auto plan = plan_resolution(376, 343);
  Rng rng(2);
  GanConfig cfg;
  const auto d = Discriminator<float>::init(plan, cfg, rng);
  std::vector<Shape> trace;
  const auto out = d.forward(Tensor<float>::zeros({2, 376}), Tensor<float>::zeros({2, 343}), cfg, false, rng, &trace);
  CHECK(trace[0] == Shape{2, 32, 32});
  CHECK(trace[1] == Shape{2, 4, 4, 256});
  CHECK(trace[1][1] * trace[1][2] == 16);
  CHECK(out.shape() == Shape{2, 1});
  CHECK(d.blocks.size() == 4);
}

TEST_CASE("channel arithmetic per stage") {
  GanConfig cfg;
  for (std::size_t need : {20u, 100u, 300u, 2000u, 5000u}) {
    const auto plan = plan_resolution(need, 0);
    Rng rng(3);
    cfg.expansion = 1;
    const auto g = Generator<float>::init(plan, cfg, rng);
    for (std::size_t i = 0; i < g.stages.size(); ++i) {
      std::size_t div = 1;
      for (std::size_t j = 0; j < i; ++j) div *= 4;
      CHECK(g.stages[i].dim == g.c0 / div);
      CHECK(g.stages[i].height == cfg.h0 << i);
    }
    CHECK(g.head.w.dim(0) == plan.side * plan.side);
  }
}

TEST_CASE("a single-stage plan still has one generator FNB") {
  Rng rng(4);
  const auto g = Generator<double>::init(plan_resolution(5, 4), GanConfig{}, rng);
  CHECK(g.stages.empty());
  CHECK(g.final.size() == 1);
  const auto d = Discriminator<double>::init(plan_resolution(5, 4), GanConfig{}, rng);
  CHECK(d.patch.kernel == 2);
}

TEST_CASE("generator forward is deterministic") {
  const auto cfg = tiny_config();
  const auto plan = plan_resolution(15, 5);
  auto run = [&] {
    Rng rng(9);
    const auto g = Generator<double>::init(plan, cfg, rng);
    const auto z = random_tensor({3, cfg.noise_dim}, rng);
    return g.forward(z, TD::zeros({3, 5}), cfg, true, rng).to_vector();
  };
  CHECK(run() == run());
}

TEST_CASE("generator gradient on a tiny config") {
  const auto cfg = tiny_config();
  const auto plan = plan_resolution(15, 5);
  CHECK(plan.side == 8);
  Rng rng(5);
  const auto g = Generator<double>::init(plan, cfg, rng);
  const auto cond = random_tensor({2, 5}, rng);
  const auto r = check_gradient(
      "generator",
      [&](const std::vector<TD>& v) {
        Rng fwd(1);
        return ops::sum_all(g.forward(v[0], cond, cfg, false, fwd));
      },
      {random_tensor({2, cfg.noise_dim}, rng)}, rng);
  CHECK(r.max_rel_error <= 1e-4);
}

TEST_CASE("discriminator gradient on a tiny config") {
  const auto cfg = tiny_config();
  const auto plan = plan_resolution(15, 5);
  Rng rng(6);
  const auto d = Discriminator<double>::init(plan, cfg, rng);
  const auto cond = random_tensor({2, 5}, rng);
  const auto r = check_gradient(
      "discriminator",
      [&](const std::vector<TD>& v) {
        Rng fwd(1);
        return ops::sum_all(d.forward(v[0], cond, cfg, true, fwd));
      },
      {random_tensor({2, 15}, rng)}, rng);
  CHECK(r.max_rel_error <= 1e-4);

  Tape<double> tape;
  const auto x = tape.watch(random_tensor({4, 15}, rng));
  Rng fwd(2);
  const auto out = d.forward(x, random_tensor({4, 5}, rng), cfg, false, fwd);
  for (double v : out.data()) CHECK(std::isfinite(v));
  const auto gx = tape.backward(ops::sum_all(out)).of(x);
  REQUIRE(gx.has_value());
  for (double v : gx->data()) CHECK(std::isfinite(v));
}

TEST_CASE("output activations") {
  const auto layout = toy_layout();
  REQUIRE(layout.d_enc == 7);
  Rng rng(7);
  const auto raw = random_tensor({50, 7}, rng, -3, 3);
  const auto y = apply_output_activations(raw, layout, 0.2, rng);
  for (std::size_t r = 0; r < 50; ++r) {
    double modes = 0, cats = 0;
    for (std::size_t i = 1; i < 4; ++i) modes += y[r * 7 + i];
    for (std::size_t i = 4; i < 6; ++i) cats += y[r * 7 + i];
    CHECK(std::abs(modes - 1) <= 1e-6);
    CHECK(std::abs(cats - 1) <= 1e-6);
    CHECK(std::abs(y[r * 7 + 0]) < 1.0);
    CHECK(y[r * 7 + 0] == std::tanh(raw[r * 7 + 0]));
    CHECK(std::abs(y[r * 7 + 6]) < 1.0);
  }
}

TEST_CASE("low temperature pushes one-hot segments to vertices") {
  const auto layout = toy_layout();
  Rng rng(8);
  // Logits with a margin of 1 on a random winner per segment.
  std::vector<double> raw(200 * 7, 0.0);
  for (std::size_t r = 0; r < 200; ++r) {
    raw[r * 7 + 1 + rng.index(3)] = 1.0;
    raw[r * 7 + 4 + rng.index(2)] = 1.0;
  }
  // Gumbel noise occasionally produces a near tie, so check the mean of the segment maxima.
  const auto y = apply_output_activations(TD({200, 7}, std::vector<double>(raw.begin(), raw.end())), layout, 0.01, rng);
  double mean_max = 0;
  for (std::size_t r = 0; r < 200; ++r) {
    double m1 = 0, m2 = 0;
    for (std::size_t i = 1; i < 4; ++i) m1 = std::max(m1, y[r * 7 + i]);
    for (std::size_t i = 4; i < 6; ++i) m2 = std::max(m2, y[r * 7 + i]);
    mean_max += (m1 + m2) / 400.0;
  }
  CHECK(mean_max >= 0.99);
}

TEST_CASE("auxiliary predictor heads and gradient") {
  Rng rng(10);
  const auto cfg = tiny_config();
  const auto cls = AuxPredictor<double>::init(6, 3, cfg, rng);
  CHECK(cls.forward(random_tensor({4, 6}, rng)).shape() == Shape{4, 3});
  const auto reg = AuxPredictor<double>::init(6, 1, cfg, rng);
  CHECK(reg.forward(random_tensor({4, 6}, rng)).shape() == Shape{4, 1});
  const auto r = check_gradient(
      "aux",
      [&](const std::vector<TD>& v) {
        auto a = reg;
        auto ps = a.parameters();
        for (std::size_t i = 0; i < ps.size(); ++i) *ps[i] = v[i + 1];
        return random_projection(a.forward(v[0]), 4);
      },
      [&] {
        std::vector<TD> in{random_tensor({4, 6}, rng)};
        auto a = reg;
        for (auto* p : a.parameters()) in.push_back(*p);
        return in;
      }(),
      rng);
  CHECK(r.max_rel_error <= 1e-4);
}

TEST_CASE("aux layout splits features from the target") {
  TableSchema s;
  ColumnSpec x{"x", ColumnKind::continuous};
  ColumnSpec y{"y", ColumnKind::categorical, {"p", "q", "r"}};
  y.target = true;
  y.task = Task::classification;
  ColumnSpec z{"z", ColumnKind::minmax};
  s.columns = {x, y, z};
  Table t = Table::empty(3);
  Rng data(1);
  for (int i = 0; i < 50; ++i) {
    t.columns[0].push_back(data.normal());
    t.columns[1].push_back(i % 3);
    t.columns[2].push_back(i);
  }
  Rng rng(2);
  const auto tr = DataTransformer::fit(t, s, VgmOptions{}, rng);
  const auto a = make_aux_layout(tr);
  CHECK(a.output_width == 3);
  CHECK(a.feature_width == tr.layout().d_enc - 3);
  const auto enc = tr.encode(t, rng);
  const TD rows({enc.rows, enc.cols}, enc.data);
  const auto f = aux_features(rows, a);
  CHECK(f.shape() == Shape{50, a.feature_width});
  const auto target = aux_target(rows, a);
  for (std::size_t r = 0; r < 50; ++r) CHECK(target[r * 3 + r % 3] == 1.0);

  s.columns[1].target = false;
  s.columns[1].task = Task::none;
  const auto none = DataTransformer::fit(t, s, VgmOptions{}, rng);
  CHECK_THROWS_AS(make_aux_layout(none), std::logic_error);
}

TEST_CASE("regression aux target is the standardized soft-decoded value") {
  TableSchema s;
  ColumnSpec x{"x", ColumnKind::categorical, {"a", "b"}};
  ColumnSpec y{"y", ColumnKind::continuous};
  y.target = true;
  y.task = Task::regression;
  s.columns = {x, y};
  Table t = Table::empty(2);
  Rng data(3);
  for (int i = 0; i < 200; ++i) {
    t.columns[0].push_back(i % 2);
    t.columns[1].push_back(data.normal(10, 2));
  }
  Rng rng(4);
  const auto tr = DataTransformer::fit(t, s, VgmOptions{}, rng);
  const auto a = make_aux_layout(tr);
  const auto enc = tr.encode(t, rng);
  const auto target = aux_target(TD({enc.rows, enc.cols}, enc.data), a);
  const auto decoded = tr.decode(enc);
  for (std::size_t r = 0; r < 200; ++r) {
    CHECK(target[r] == doctest::Approx((decoded.columns[1][r] - a.center) / a.scale).epsilon(1e-9));
  }
}

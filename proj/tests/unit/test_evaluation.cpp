#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fctgan/evaluation/metrics.hpp"
#include "fctgan/evaluation/ml.hpp"
#include "fctgan/evaluation/report.hpp"
#include "fctgan/evaluation/study.hpp"
#include "fctgan/numerics/rng.hpp"
#include "support/metric_oracles.hpp"

using namespace fctgan;
using namespace fctgan::oracle;

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

Table columns(std::vector<std::vector<double>> cols) { return Table{std::move(cols)}; }

}  // namespace

TEST_CASE("jsd hand values") {
  const std::vector<double> p{1, 0}, q{0.5, 0.5};
  CHECK(std::abs(jsd(p, q) - 0.3113) <= 1e-4);
  const std::vector<double> a{3, 0}, b{0, 5};
  CHECK(jsd(a, b) == 1.0);
  CHECK(jsd(a, a) == 0.0);
}

TEST_CASE("avg_jsd matches the entropy oracle on random cases") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto c = random_case(seed);
    double want = 0;
    std::size_t n = 0;
    for (std::size_t j = 0; j < c.schema.size(); ++j) {
      if (!c.schema[j].is_categorical()) continue;
      want += oracle_jsd(c.a.columns[j], c.b.columns[j]);
      ++n;
    }
    const auto got = avg_jsd(c.a, c.b, c.schema);
    REQUIRE(got);
    CHECK(std::abs(*got - want / static_cast<double>(n)) <= 1e-8);
    CHECK(*avg_jsd(c.a, c.b, c.schema) == *avg_jsd(c.b, c.a, c.schema));
    CHECK(*got >= 0.0);
    CHECK(*got <= 1.0);
  }
}

TEST_CASE("avg_jsd absent without categorical columns") {
  TableSchema s;
  s.columns = {numeric("x"), numeric("y")};
  const auto t = columns({{1, 2, 3}, {4, 5, 6}});
  CHECK_FALSE(avg_jsd(t, t, s).has_value());
}

TEST_CASE("wasserstein1 examples and quantile oracle") {
  CHECK(wasserstein1({0.0}, {1.0}) == 1.0);
  CHECK(wasserstein1({1, 2, 3}, {3, 2, 1}) == 0.0);
  Rng rng(5);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> a(8), b(8);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal(0.5, 2);
    auto sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double coupled = 0;
    for (std::size_t i = 0; i < 8; ++i) coupled += std::abs(sa[i] - sb[i]) / 8;
    CHECK(std::abs(wasserstein1(a, b) - coupled) <= 1e-9);
  }
  for (int k = 0; k < 10; ++k) {
    std::vector<double> a(3 + rng.index(10)), b(3 + rng.index(10));
    for (auto& v : a) v = std::round(rng.normal() * 3);
    for (auto& v : b) v = std::round(rng.normal(1, 2) * 3);
    CHECK(std::abs(wasserstein1(a, b) - oracle_w1(a, b)) <= 1e-9);
  }
}

TEST_CASE("avg_wd matches the scaled quantile oracle on random cases") {
  for (std::uint64_t seed = 20; seed < 32; ++seed) {
    const auto c = random_case(seed);
    double want = 0;
    std::size_t n = 0;
    for (std::size_t j = 0; j < c.schema.size(); ++j) {
      if (c.schema[j].is_categorical()) continue;
      const auto& ra = c.a.columns[j];
      const double lo = *std::min_element(ra.begin(), ra.end()), hi = *std::max_element(ra.begin(), ra.end());
      if (hi == lo) continue;
      want += oracle_w1(ra, c.b.columns[j]) / (hi - lo);
      ++n;
    }
    const auto got = avg_wd(c.a, c.b, c.schema);
    REQUIRE(got.has_value() == (n > 0));
    if (got) CHECK(std::abs(*got - want / static_cast<double>(n)) <= 1e-8);
    if (got) CHECK(*avg_wd(c.a, c.a, c.schema) == 0.0);
  }
}

TEST_CASE("avg_wd skips constant columns and special values") {
  TableSchema s;
  s.columns = {numeric("x"), numeric("k")};
  ColumnSpec mixed = numeric("m");
  mixed.kind = ColumnKind::mixed;
  mixed.specials = {-1};
  s.columns.push_back(mixed);
  const auto real = columns({{0, 1, 0, 1}, {5, 5, 5, 5}, {0, 2, -1, -1}});
  const auto synth = columns({{1, 1, 1, 1}, {0, 9, 3, 1}, {-1, 2, 2, -1}});
  std::vector<std::string> warnings;
  const auto got = avg_wd(real, synth, s, &warnings);
  REQUIRE(got);
  // x: real {0,0,1,1} vs {1,1,1,1} -> 0.5. m: real {0,2}/2 vs {2,2}/2 -> 0.5.
  CHECK(*got == doctest::Approx(0.5));
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("'k'") != std::string::npos);
}

TEST_CASE("corr_matrix matches the association oracles on random cases") {
  for (std::uint64_t seed = 40; seed < 52; ++seed) {
    auto c = random_case(seed);
    if (c.a.rows() < 3) continue;
    const auto got = corr_matrix(c.a, c.schema);
    const auto want = oracle_corr(c.a, c.schema);
    for (std::size_t i = 0; i < c.schema.size(); ++i) {
      CHECK(got(i, i) == 1.0);
      for (std::size_t j = 0; j < c.schema.size(); ++j) {
        CHECK(std::abs(got(i, j) - want(i, j)) <= 1e-8);
        if (c.schema[i].is_categorical() || c.schema[j].is_categorical()) {
          CHECK(got(i, j) >= 0.0);
        } else {
          CHECK(got(i, j) >= -1.0);
        }
        CHECK(got(i, j) <= 1.0);
      }
    }
  }
}

TEST_CASE("corr_matrix hand examples") {
  TableSchema s;
  s.columns = {numeric("x"), numeric("y")};
  const auto lin = columns({{1, 2, 3, 4, 7}, {5, 7, 9, 11, 17}});
  CHECK(corr_matrix(lin, s)(0, 1) == doctest::Approx(1.0).epsilon(1e-12));

  TableSchema cs;
  cs.columns = {categorical("a", 4), categorical("b", 2)};
  // b = a mod 2, so a determines b.
  const auto det = columns({{0, 1, 2, 3, 0, 1, 2, 3}, {0, 1, 0, 1, 0, 1, 0, 1}});
  const auto m = corr_matrix(det, cs);
  CHECK(m(1, 0) == doctest::Approx(1.0));
  CHECK(m(0, 1) == doctest::Approx(0.5));

  TableSchema flat;
  flat.columns = {numeric("x"), numeric("k")};
  std::vector<std::string> warnings;
  const auto z = corr_matrix(columns({{1, 2, 3}, {4, 4, 4}}), flat, &warnings);
  CHECK(z(0, 1) == 0.0);
  CHECK(warnings.size() == 1);

  CHECK_THROWS(corr_matrix(columns({{1, 2}, {3, 4}}), s));
  TableSchema one;
  one.columns = {numeric("x")};
  CHECK_THROWS(corr_matrix(columns({{1, 2, 3}}), one));
}

TEST_CASE("corr_matrix of independent columns is near zero") {
  TableSchema s;
  s.columns = {numeric("x"), numeric("y"), categorical("a", 3), categorical("b", 4)};
  Rng rng(9);
  Table t = Table::empty(4);
  for (int r = 0; r < 10000; ++r) {
    t.columns[0].push_back(rng.uniform());
    t.columns[1].push_back(rng.uniform());
    t.columns[2].push_back(static_cast<double>(rng.index(3)));
    t.columns[3].push_back(static_cast<double>(rng.index(4)));
  }
  const auto m = corr_matrix(t, s);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i != j) CHECK(std::abs(m(i, j)) <= 0.05);
    }
  }
}

TEST_CASE("diff_corr matches the oracle and is permutation invariant") {
  for (std::uint64_t seed = 60; seed < 72; ++seed) {
    const auto c = random_case(seed);
    if (c.a.rows() < 3 || c.b.rows() < 3) continue;
    const auto ma = oracle_corr(c.a, c.schema), mb = oracle_corr(c.b, c.schema);
    double ss = 0;
    for (std::size_t i = 0; i < c.schema.size(); ++i) {
      for (std::size_t j = 0; j < c.schema.size(); ++j) {
        if (i != j) ss += std::pow(ma(i, j) - mb(i, j), 2);
      }
    }
    const double got = diff_corr(c.a, c.b, c.schema);
    CHECK(std::abs(got - std::sqrt(ss)) <= 1e-8);
    std::vector<std::size_t> order(c.schema.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = order.size() - 1 - i;
    const double permuted = diff_corr(c.a.permuted(order), c.b.permuted(order), c.schema.permuted(order));
    CHECK(std::abs(got - permuted) <= 1e-12);
    CHECK(diff_corr(c.a, c.a, c.schema) == 0.0);
  }
}

TEST_CASE("diff_corr of a half correlation gap") {
  TableSchema s;
  s.columns = {numeric("x"), numeric("y")};
  const std::vector<double> u{1, -1, 1, -1}, v{1, 1, -1, -1};
  std::vector<double> y(4);
  for (int i = 0; i < 4; ++i) y[i] = 0.5 * u[i] + std::sqrt(0.75) * v[i];
  CHECK(diff_corr(columns({u, u}), columns({u, y}), s) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("mav and normalized mav") {
  const std::vector<double> l{0.1, 0.3, 0.2};
  CHECK(mav(l) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(*normalized_mav(l) == doctest::Approx(200.0).epsilon(1e-12));
  const std::vector<double> flat{0.4, 0.4};
  CHECK(mav(flat) == 0.0);
  CHECK(*normalized_mav(flat) == 0.0);
  const std::vector<double> zero{0.0, 0.5};
  CHECK_FALSE(normalized_mav(zero).has_value());
  const std::vector<double> single{1.0};
  CHECK_THROWS(mav(single));
  CHECK_THROWS(normalized_mav(single));

  Rng rng(3);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> v(2 + rng.index(5));
    for (auto& x : v) x = rng.uniform(0.01, 2);
    const double want = oracle_mav(v);
    CHECK(std::abs(mav(v) - want) <= 1e-12);
    CHECK(std::abs(*normalized_mav(v) - want / *std::min_element(v.begin(), v.end()) * 100) <= 1e-8);
  }
}

TEST_CASE("column orders") {
  TableSchema s;
  s.columns = {categorical("c0", 2), numeric("n1"), categorical("c2", 2), numeric("n3")};
  const auto t = columns({{0, 1, 0, 1}, {1, 2, 3, 5}, {1, 1, 0, 0}, {2, 1, 4, 3}});
  CHECK(column_order(t, s, ColumnOrder::original) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(column_order(t, s, ColumnOrder::by_type) == std::vector<std::size_t>{1, 3, 0, 2});

  Matrix c(3, 3, 1.0);
  c(0, 1) = c(1, 0) = 0.9;
  c(0, 2) = c(2, 0) = 0.5;
  c(1, 2) = c(2, 1) = 0.1;
  CHECK(correlation_order(c) == std::vector<std::size_t>{0, 1, 2});
  c(1, 2) = c(2, 1) = -0.95;
  CHECK(correlation_order(c) == std::vector<std::size_t>{1, 2, 0});

  Matrix d(4, 4, 1.0);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i != j) d(i, j) = 0.0;
    }
  }
  d(2, 3) = 0.8;  // asymmetric: the larger direction counts
  d(3, 2) = 0.1;
  CHECK(correlation_order(d) == std::vector<std::size_t>{2, 3, 0, 1});

  const auto order = column_order(t, s, ColumnOrder::by_correlation);
  CHECK(order.size() == 4);
  CHECK(std::set<std::size_t>(order.begin(), order.end()).size() == 4);
  CHECK(parse_column_order("by_type") == ColumnOrder::by_type);
  CHECK_THROWS(parse_column_order("random"));
}

TEST_CASE("classification metrics against hand values") {
  const std::vector<std::size_t> truth{0, 1, 1, 0, 1}, pred{0, 1, 0, 1, 1};
  CHECK(accuracy(truth, pred) == doctest::Approx(0.6));
  // class 1: tp 2, fp 1, fn 1.
  CHECK(f1_score(truth, pred, 2) == doctest::Approx(2.0 / 3.0));
  const std::vector<std::size_t> t3{0, 1, 2, 2}, p3{0, 2, 2, 1};
  // f1: class0 1, class1 0, class2 0.5.
  CHECK(f1_score(t3, p3, 3) == doctest::Approx(0.5));

  Rng rng(11);
  for (int k = 0; k < 10; ++k) {
    std::vector<bool> pos(20);
    std::vector<double> score(20);
    for (int i = 0; i < 20; ++i) {
      pos[i] = rng.uniform() < 0.4;
      score[i] = std::round(rng.uniform() * 5);
    }
    double wins = 0, pairs = 0;
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        if (!pos[i] || pos[j]) continue;
        pairs += 1;
        wins += score[i] > score[j] ? 1.0 : score[i] == score[j] ? 0.5 : 0.0;
      }
    }
    const auto auc = binary_auc(pos, score);
    if (pairs == 0) {
      CHECK_FALSE(auc.has_value());
    } else {
      CHECK(std::abs(*auc - wins / pairs) <= 1e-12);
    }
  }
}

TEST_CASE("regression metrics against hand values") {
  const std::vector<double> y{1, 2, 3, 4}, p{1, 2, 3, 5};
  CHECK(r2_score(y, p) == doctest::Approx(1 - 1.0 / 5.0));
  // residuals {0,0,0,-1}: mean -0.25, var sum 0.75.
  CHECK(explained_variance(y, p) == doctest::Approx(1 - 0.75 / 5.0));
  CHECK(mape(y, p) == doctest::Approx(0.25 / 4));
  CHECK(r2_score(y, y) == 1.0);
}

TEST_CASE("linear regressors against closed forms") {
  // Orthogonal centered design: OLS w = X'y / diag, lasso soft-thresholds it.
  Matrix x(4, 2);
  const double xs[4][2] = {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
  for (int i = 0; i < 4; ++i) {
    x(i, 0) = xs[i][0];
    x(i, 1) = xs[i][1];
  }
  const std::vector<double> y{3 + 2 + 0.5, 3 - 2 + 0.5, 3 + 2 - 0.5, 3 - 2 - 0.5};
  const auto ols = make_least_squares();
  ols->fit(x, y);
  const auto p = ols->predict(x);
  for (int i = 0; i < 4; ++i) CHECK(p[i] == doctest::Approx(y[i]).epsilon(1e-12));

  const auto ridge = make_ridge(4.0);
  ridge->fit(x, y);
  // (X'X + 4I)^-1 X'y = 8 / 8 = 1 and 2 / 8 = 0.25.
  CHECK(ridge->predict(x)[0] == doctest::Approx(3 + 1 + 0.25).epsilon(1e-12));

  // Standardized target: y_std = sqrt(mean((y - 3)^2)) = sqrt(4.25).
  const double sy = std::sqrt(4.25), alpha = 0.1;
  const auto lasso = make_lasso(alpha);
  lasso->fit(x, y);
  const double w0 = std::max(2 / sy - alpha, 0.0) * sy, w1 = std::max(0.5 / sy - alpha, 0.0) * sy;
  CHECK(lasso->predict(x)[0] == doctest::Approx(3 + w0 + w1).epsilon(1e-9));
}

TEST_CASE("classifiers separate a threshold rule") {
  Rng rng(2);
  Matrix x(200, 2);
  std::vector<std::size_t> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
    y[i] = x(i, 0) > 0.3 ? 1 : 0;
  }
  for (auto& model : default_classifiers(1)) {
    model->fit(x, y, 2);
    const auto p = model->predict_proba(x);
    std::vector<std::size_t> pred(200);
    for (std::size_t i = 0; i < 200; ++i) {
      pred[i] = p(i, 1) > p(i, 0) ? 1 : 0;
      CHECK(p(i, 0) + p(i, 1) == doctest::Approx(1.0));
    }
    INFO(model->name());
    CHECK(accuracy(y, pred) >= 0.95);
  }
}

TEST_CASE("ml utility of identical training data is zero") {
  for (const char* name : {"bimodal", "mixed", "small"}) {
    const auto f = load(name);
    const auto [train, test] = split_rows(f.table, f.schema, 0.25, 4);
    const auto tr = f.table.select_rows(train), te = f.table.select_rows(test);
    const auto u = ml_utility(tr, tr, te, f.schema, 3);
    INFO(name);
    CHECK(u.deltas.size() == 3);
    for (const auto& [k, v] : u.deltas) CHECK(v == 0.0);
    CHECK(u.learners.size() == 3);
  }
}

TEST_CASE("ml utility detects label shuffling") {
  const auto f = load("bimodal");
  const auto [train, test] = split_rows(f.table, f.schema, 0.25, 4);
  const auto tr = f.table.select_rows(train), te = f.table.select_rows(test);
  auto shuffled = tr;
  Rng rng(8);
  auto& label = shuffled.columns[*f.schema.target_index()];
  for (std::size_t i = label.size(); i > 1; --i) std::swap(label[i - 1], label[rng.index(i)]);
  const auto u = ml_utility(tr, shuffled, te, f.schema, 3);
  CHECK(u.deltas.at("accuracy") >= 0.3);
}

TEST_CASE("ml utility on a same-law regression") {
  TableSchema s;
  s.columns = {numeric("x"), numeric("y")};
  s.columns[1].target = true;
  s.columns[1].task = Task::regression;
  auto draw = [](std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    Table t = Table::empty(2);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = rng.normal();
      t.columns[0].push_back(x);
      t.columns[1].push_back(3 * x + 0.5 * rng.normal());
    }
    return t;
  };
  const auto u = ml_utility(draw(1, 500), draw(2, 500), draw(3, 300), s);
  CHECK(u.deltas.at("r2") <= 0.05);
}

TEST_CASE("ml utility flags a missing class") {
  const auto f = load("bimodal");
  const auto [train, test] = split_rows(f.table, f.schema, 0.25, 4);
  const auto tr = f.table.select_rows(train), te = f.table.select_rows(test);
  std::vector<std::size_t> only_a;
  const auto target = *f.schema.target_index();
  for (std::size_t r = 0; r < tr.rows(); ++r) {
    if (tr.columns[target][r] == 0) only_a.push_back(r);
  }
  const auto u = ml_utility(tr, tr.select_rows(only_a), te, f.schema);
  for (const auto& l : u.learners) CHECK(l.degenerate);
  for (const auto& [k, v] : u.deltas) CHECK(std::isfinite(v));
  TableSchema none;
  none.columns = {numeric("x"), numeric("y")};
  const auto t = columns({{1, 2, 3}, {1, 2, 3}});
  CHECK_THROWS_AS(ml_utility(t, t, t, none), std::invalid_argument);
}

TEST_CASE("stratified split") {
  const auto f = load("mixed");
  const auto [train, test] = split_rows(f.table, f.schema, 0.2, 1);
  CHECK(train.size() + test.size() == f.table.rows());
  std::set<std::size_t> all(train.begin(), train.end());
  all.insert(test.begin(), test.end());
  CHECK(all.size() == f.table.rows());
  const auto target = *f.schema.target_index();
  auto share = [&](const std::vector<std::size_t>& rows) {
    double n = 0;
    for (auto r : rows) n += f.table.columns[target][r];
    return n / static_cast<double>(rows.size());
  };
  CHECK(std::abs(share(train) - share(test)) <= 0.01);
  CHECK(split_rows(f.table, f.schema, 0.2, 1) == split_rows(f.table, f.schema, 0.2, 1));
  CHECK_THROWS(split_rows(f.table, f.schema, 1.0, 1));
}

TEST_CASE("evaluate report contents") {
  const auto f = load("mixed");
  const auto [train, test] = split_rows(f.table, f.schema, 0.25, 2);
  const auto tr = f.table.select_rows(train), te = f.table.select_rows(test);
  const auto r = evaluate(tr, tr, f.schema, &te);
  CHECK(*r.avg_jsd == 0.0);
  CHECK(*r.avg_wd == 0.0);
  CHECK(*r.diff_corr == 0.0);
  REQUIRE(r.ml);
  CHECK(r.values().size() == 6);
  const auto j = report_to_json(r);
  CHECK(j.at("avg_jsd").get<double>() == 0.0);
  CHECK(j.at("ml_utility").at("task") == "classification");
  CHECK(format_report(r).find("ml.accuracy") != std::string::npos);

  auto no_target = f.schema;
  for (auto& c : no_target.columns) c.target = false;
  const auto plain = evaluate(tr, tr, no_target, &te);
  CHECK_FALSE(plain.ml.has_value());
  CHECK_FALSE(report_to_json(plain).contains("ml_utility"));
}

TEST_CASE("permutation study with a perfect synthesizer") {
  const auto f = load("mixed");
  const auto [train, test] = split_rows(f.table, f.schema, 0.25, 2);
  const auto tr = f.table.select_rows(train), te = f.table.select_rows(test);
  std::size_t calls = 0;
  const Synthesizer copy = [&](const Table& t, const TableSchema&, std::uint64_t) {
    ++calls;
    return t;
  };
  PermStudyConfig cfg;
  const auto report = perm_study(tr, &te, f.schema, copy, cfg);
  CHECK(calls == 3);
  REQUIRE(report.orders.size() == 3);
  CHECK(report.mav.size() == 6);
  for (const auto& e : report.mav) {
    if (e.metric.rfind("ml.", 0) == 0) continue;
    CHECK(e.mav == 0.0);
  }
  CHECK(report.orders[1].permutation == std::vector<std::size_t>{0, 2, 3, 1, 4});
  const auto j = perm_study_to_json(report);
  CHECK(j.at("orders").size() == 3);
  CHECK(j.at("mav").size() == 6);

  cfg.orders = {ColumnOrder::original, ColumnOrder::by_type};
  cfg.runs = 2;
  const auto two = perm_study(tr, &te, f.schema, copy, cfg);
  CHECK(two.orders.size() == 2);
  CHECK(calls == 7);
  for (const auto& e : two.mav) CHECK(e.values.size() == 2);
}

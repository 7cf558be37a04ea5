#include "fctgan/evaluation/ml.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "fctgan/numerics/rng.hpp"

namespace fctgan {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

namespace {

Mat to_eigen(const Matrix& m) {
  Mat out(m.rows, m.cols);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) out(r, c) = m(r, c);
  }
  return out;
}

Matrix from_eigen(const Mat& m) {
  Matrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
  }
  return out;
}

void softmax_rows(Mat& z) {
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double m = z.row(r).maxCoeff();
    z.row(r) = (z.row(r).array() - m).exp();
    z.row(r) /= z.row(r).sum();
  }
}

Mat onehot(const std::vector<std::size_t>& y, std::size_t k) {
  Mat out = Mat::Zero(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < y.size(); ++i) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(y[i])) = 1;
  return out;
}

std::vector<std::size_t> argmax_rows(const Matrix& p) {
  std::vector<std::size_t> out(p.rows);
  for (std::size_t r = 0; r < p.rows; ++r) {
    out[r] = static_cast<std::size_t>(std::max_element(p.row(r), p.row(r) + p.cols) - p.row(r));
  }
  return out;
}

class Logistic final : public Classifier {
 public:
  explicit Logistic(LogisticOptions o) : o_(o) {}
  std::string name() const override { return "logistic"; }

  void fit(const Matrix& xm, const std::vector<std::size_t>& y, std::size_t k) override {
    const Mat x = to_eigen(xm);
    const Mat t = onehot(y, k);
    const double n = static_cast<double>(std::max<std::size_t>(y.size(), 1));
    w_ = Mat::Zero(x.cols(), static_cast<Eigen::Index>(k));
    b_ = Vec::Zero(static_cast<Eigen::Index>(k));
    for (std::size_t it = 0; it < o_.iterations; ++it) {
      Mat z = (x * w_).rowwise() + b_.transpose();
      softmax_rows(z);
      const Mat err = (z - t) / n;
      w_ -= o_.learning_rate * (x.transpose() * err + o_.l2 * w_);
      b_ -= o_.learning_rate * err.colwise().sum().transpose();
    }
  }

  Matrix predict_proba(const Matrix& xm) const override {
    Mat z = (to_eigen(xm) * w_).rowwise() + b_.transpose();
    softmax_rows(z);
    return from_eigen(z);
  }

 private:
  LogisticOptions o_;
  Mat w_;
  Vec b_;
};

class Tree final : public Classifier {
 public:
  explicit Tree(TreeOptions o) : o_(o) {}
  std::string name() const override { return "decision_tree"; }

  void fit(const Matrix& x, const std::vector<std::size_t>& y, std::size_t k) override {
    k_ = k;
    nodes_.clear();
    std::vector<std::size_t> rows(y.size());
    std::iota(rows.begin(), rows.end(), 0);
    build(x, y, rows, 0);
  }

  Matrix predict_proba(const Matrix& x) const override {
    Matrix out(x.rows, k_);
    for (std::size_t r = 0; r < x.rows; ++r) {
      std::size_t n = 0;
      while (nodes_[n].feature != kLeaf) {
        n = x(r, nodes_[n].feature) <= nodes_[n].threshold ? nodes_[n].left : nodes_[n].right;
      }
      for (std::size_t c = 0; c < k_; ++c) out(r, c) = nodes_[n].proba[c];
    }
    return out;
  }

 private:
  static constexpr std::size_t kLeaf = std::numeric_limits<std::size_t>::max();
  struct Node {
    std::size_t feature = kLeaf;
    double threshold = 0;
    std::size_t left = 0, right = 0;
    std::vector<double> proba;
  };

  static double gini(const std::vector<double>& counts, double n) {
    if (n <= 0) return 0;
    double s = 0;
    for (double c : counts) s += (c / n) * (c / n);
    return 1 - s;
  }

  std::size_t build(const Matrix& x, const std::vector<std::size_t>& y, const std::vector<std::size_t>& rows,
                    std::size_t depth) {
    const std::size_t id = nodes_.size();
    nodes_.emplace_back();
    std::vector<double> counts(k_, 0.0);
    for (auto r : rows) counts[y[r]] += 1;
    const double n = static_cast<double>(rows.size());
    nodes_[id].proba.resize(k_, k_ ? 1.0 / static_cast<double>(k_) : 0.0);
    if (n > 0) {
      for (std::size_t c = 0; c < k_; ++c) nodes_[id].proba[c] = counts[c] / n;
    }
    const double parent = gini(counts, n);
    if (depth >= o_.max_depth || rows.size() < 2 * o_.min_leaf || parent <= 0) return id;

    double best = parent - 1e-12;
    std::size_t best_f = kLeaf;
    double best_t = 0;
    std::vector<std::size_t> sorted = rows;
    for (std::size_t f = 0; f < x.cols; ++f) {
      std::stable_sort(sorted.begin(), sorted.end(), [&](auto a, auto b) { return x(a, f) < x(b, f); });
      std::vector<double> left(k_, 0.0), right = counts;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        left[y[sorted[i]]] += 1;
        right[y[sorted[i]]] -= 1;
        const double a = x(sorted[i], f), b = x(sorted[i + 1], f);
        const double nl = static_cast<double>(i + 1), nr = n - nl;
        if (a == b || i + 1 < o_.min_leaf || sorted.size() - i - 1 < o_.min_leaf) continue;
        const double score = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
        if (score < best) {
          best = score;
          best_f = f;
          best_t = 0.5 * (a + b);
        }
      }
    }
    if (best_f == kLeaf) return id;
    std::vector<std::size_t> lrows, rrows;
    for (auto r : rows) (x(r, best_f) <= best_t ? lrows : rrows).push_back(r);
    nodes_[id].feature = best_f;
    nodes_[id].threshold = best_t;
    const std::size_t l = build(x, y, lrows, depth + 1);
    const std::size_t r = build(x, y, rrows, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  TreeOptions o_;
  std::size_t k_ = 0;
  std::vector<Node> nodes_;
};

class Mlp final : public Classifier {
 public:
  explicit Mlp(MlpOptions o) : o_(o) {}
  std::string name() const override { return "mlp"; }

  void fit(const Matrix& xm, const std::vector<std::size_t>& y, std::size_t k) override {
    const Mat x = to_eigen(xm);
    const Mat t = onehot(y, k);
    const auto d = x.cols(), h = static_cast<Eigen::Index>(o_.hidden), kk = static_cast<Eigen::Index>(k);
    const double n = static_cast<double>(std::max<std::size_t>(y.size(), 1));
    Rng rng(o_.seed);
    w1_ = Mat(d, h);
    w2_ = Mat(h, kk);
    for (Eigen::Index i = 0; i < w1_.size(); ++i) w1_.data()[i] = rng.normal() / std::sqrt(static_cast<double>(std::max<Eigen::Index>(d, 1)));
    for (Eigen::Index i = 0; i < w2_.size(); ++i) w2_.data()[i] = rng.normal() / std::sqrt(static_cast<double>(h));
    b1_ = Vec::Zero(h);
    b2_ = Vec::Zero(kk);

    Mat m_w1 = Mat::Zero(d, h), v_w1 = m_w1, m_w2 = Mat::Zero(h, kk), v_w2 = m_w2;
    Vec m_b1 = Vec::Zero(h), v_b1 = m_b1, m_b2 = Vec::Zero(kk), v_b2 = m_b2;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    auto adam = [&](auto& p, auto& m, auto& v, const auto& g, double step) {
      m = b1 * m + (1 - b1) * g;
      v = b2 * v + (1 - b2) * g.cwiseProduct(g);
      const double c1 = 1 - std::pow(b1, step), c2 = 1 - std::pow(b2, step);
      p.array() -= o_.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    };
    for (std::size_t it = 1; it <= o_.iterations; ++it) {
      const Mat a = ((x * w1_).rowwise() + b1_.transpose()).array().tanh().matrix();
      Mat z = (a * w2_).rowwise() + b2_.transpose();
      softmax_rows(z);
      const Mat dz = (z - t) / n;
      const Mat g_w2 = a.transpose() * dz;
      const Vec g_b2 = dz.colwise().sum().transpose();
      const Mat da = (dz * w2_.transpose()).cwiseProduct((1 - a.array().square()).matrix());
      const Mat g_w1 = x.transpose() * da;
      const Vec g_b1 = da.colwise().sum().transpose();
      const double s = static_cast<double>(it);
      adam(w1_, m_w1, v_w1, g_w1, s);
      adam(b1_, m_b1, v_b1, g_b1, s);
      adam(w2_, m_w2, v_w2, g_w2, s);
      adam(b2_, m_b2, v_b2, g_b2, s);
    }
  }

  Matrix predict_proba(const Matrix& xm) const override {
    const Mat a = ((to_eigen(xm) * w1_).rowwise() + b1_.transpose()).array().tanh().matrix();
    Mat z = (a * w2_).rowwise() + b2_.transpose();
    softmax_rows(z);
    return from_eigen(z);
  }

 private:
  MlpOptions o_;
  Mat w1_, w2_;
  Vec b1_, b2_;
};

// Shared centering for the linear regressors; the intercept absorbs the means.
struct Centered {
  Mat x;
  Vec y, x_mean;
  double y_mean = 0;

  Centered(const Matrix& xm, const std::vector<double>& yv) : x(to_eigen(xm)), y(static_cast<Eigen::Index>(yv.size())) {
    for (std::size_t i = 0; i < yv.size(); ++i) y(static_cast<Eigen::Index>(i)) = yv[i];
    x_mean = x.rows() ? Vec(x.colwise().mean().transpose()) : Vec::Zero(x.cols());
    y_mean = y.size() ? y.mean() : 0.0;
    x.rowwise() -= x_mean.transpose();
    y.array() -= y_mean;
  }
};

class Linear : public Regressor {
 public:
  std::vector<double> predict(const Matrix& xm) const override {
    const Vec p = ((to_eigen(xm).rowwise() - x_mean_.transpose()) * w_).array() + y_mean_;
    return {p.data(), p.data() + p.size()};
  }

 protected:
  void set(const Centered& c, Vec w) {
    w_ = std::move(w);
    x_mean_ = c.x_mean;
    y_mean_ = c.y_mean;
  }

 private:
  Vec w_, x_mean_;
  double y_mean_ = 0;
};

class LeastSquares final : public Linear {
 public:
  std::string name() const override { return "least_squares"; }
  void fit(const Matrix& x, const std::vector<double>& y) override {
    const Centered c(x, y);
    set(c, c.x.completeOrthogonalDecomposition().solve(c.y));
  }
};

class Ridge final : public Linear {
 public:
  explicit Ridge(double alpha) : alpha_(alpha) {}
  std::string name() const override { return "ridge"; }
  void fit(const Matrix& x, const std::vector<double>& y) override {
    const Centered c(x, y);
    Mat a = c.x.transpose() * c.x;
    a.diagonal().array() += alpha_;
    set(c, a.ldlt().solve(c.x.transpose() * c.y));
  }

 private:
  double alpha_;
};

// Minimizes (1/2n)||y - Xw||^2 + alpha ||w||_1 on a standardized target.
class Lasso final : public Linear {
 public:
  Lasso(double alpha, std::size_t sweeps) : alpha_(alpha), sweeps_(sweeps) {}
  std::string name() const override { return "lasso"; }
  void fit(const Matrix& x, const std::vector<double>& y) override {
    const Centered c(x, y);
    const auto n = static_cast<double>(std::max<Eigen::Index>(c.x.rows(), 1));
    const double sy = c.y.size() > 1 ? std::sqrt(c.y.squaredNorm() / n) : 1.0;
    const double ys = sy > 0 ? sy : 1.0;
    Vec r = c.y / ys;
    Vec w = Vec::Zero(c.x.cols());
    const Vec sq = c.x.colwise().squaredNorm().transpose() / n;
    for (std::size_t sweep = 0; sweep < sweeps_; ++sweep) {
      double change = 0;
      for (Eigen::Index j = 0; j < c.x.cols(); ++j) {
        if (sq(j) <= 0) continue;
        const double rho = c.x.col(j).dot(r) / n + sq(j) * w(j);
        const double next = std::copysign(std::max(std::abs(rho) - alpha_, 0.0), rho) / sq(j);
        if (next != w(j)) {
          r -= (next - w(j)) * c.x.col(j);
          change = std::max(change, std::abs(next - w(j)));
          w(j) = next;
        }
      }
      if (change < 1e-10) break;
    }
    set(c, w * ys);
  }

 private:
  double alpha_;
  std::size_t sweeps_;
};

bool numeric_cell(const ColumnSpec& spec, double v) {
  if (std::isnan(v)) return false;
  if (spec.kind != ColumnKind::mixed) return true;
  return std::find(spec.specials.begin(), spec.specials.end(), v) == spec.specials.end();
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

Featurizer::Featurizer(const Table& table, const TableSchema& schema) {
  const auto target = schema.target_index();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (target && *target == j) continue;
    const auto& spec = schema[j];
    Column col;
    col.index = j;
    col.kind = spec.kind;
    if (spec.is_categorical()) {
      for (std::size_t v = 0; v < spec.vocabulary.size(); ++v) col.indicators.push_back(static_cast<double>(v));
      width_ += col.indicators.size();
    } else {
      double s = 0, ss = 0, n = 0;
      for (double v : table.columns[j]) {
        if (!numeric_cell(spec, v)) continue;
        s += v;
        n += 1;
      }
      col.mean = n > 0 ? s / n : 0.0;
      for (double v : table.columns[j]) {
        if (numeric_cell(spec, v)) ss += (v - col.mean) * (v - col.mean);
      }
      const double sd = n > 0 ? std::sqrt(ss / n) : 0.0;
      col.scale = sd > 0 ? sd : 1.0;
      if (spec.kind == ColumnKind::mixed) {
        col.indicators = spec.specials;
        col.missing = spec.missing;
      }
      width_ += 1 + col.indicators.size() + (col.missing ? 1 : 0);
    }
    columns_.push_back(std::move(col));
  }
}

Matrix Featurizer::transform(const Table& table) const {
  Matrix out(table.rows(), width_);
  std::size_t offset = 0;
  for (const auto& col : columns_) {
    const auto& values = table.columns.at(col.index);
    for (std::size_t r = 0; r < values.size(); ++r) {
      const double v = values[r];
      std::size_t o = offset;
      if (col.kind != ColumnKind::categorical) {
        const bool special = std::isnan(v) || std::find(col.indicators.begin(), col.indicators.end(), v) != col.indicators.end();
        out(r, o++) = special ? 0.0 : (v - col.mean) / col.scale;
      }
      for (double ind : col.indicators) out(r, o++) = v == ind ? 1.0 : 0.0;
      if (col.missing) out(r, o++) = std::isnan(v) ? 1.0 : 0.0;
    }
    offset += (col.kind != ColumnKind::categorical ? 1 : 0) + col.indicators.size() + (col.missing ? 1 : 0);
  }
  return out;
}

std::unique_ptr<Classifier> make_logistic(LogisticOptions options) { return std::make_unique<Logistic>(options); }
std::unique_ptr<Classifier> make_tree(TreeOptions options) { return std::make_unique<Tree>(options); }
std::unique_ptr<Classifier> make_mlp(MlpOptions options) { return std::make_unique<Mlp>(options); }
std::unique_ptr<Regressor> make_least_squares() { return std::make_unique<LeastSquares>(); }
std::unique_ptr<Regressor> make_ridge(double alpha) { return std::make_unique<Ridge>(alpha); }
std::unique_ptr<Regressor> make_lasso(double alpha, std::size_t sweeps) {
  return std::make_unique<Lasso>(alpha, sweeps);
}

std::vector<std::unique_ptr<Classifier>> default_classifiers(std::uint64_t seed) {
  std::vector<std::unique_ptr<Classifier>> out;
  out.push_back(make_logistic());
  out.push_back(make_tree());
  MlpOptions mlp;
  mlp.seed = seed;
  out.push_back(make_mlp(mlp));
  return out;
}

std::vector<std::unique_ptr<Regressor>> default_regressors() {
  std::vector<std::unique_ptr<Regressor>> out;
  out.push_back(make_least_squares());
  out.push_back(make_ridge());
  out.push_back(make_lasso());
  return out;
}

double accuracy(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& pred) {
  if (truth.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == pred[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

double f1_score(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& pred, std::size_t n_classes) {
  auto f1_of = [&](std::size_t c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      tp += truth[i] == c && pred[i] == c;
      fp += truth[i] != c && pred[i] == c;
      fn += truth[i] == c && pred[i] != c;
    }
    return tp > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
  };
  if (n_classes == 2) return f1_of(1);
  std::set<std::size_t> labels(truth.begin(), truth.end());
  labels.insert(pred.begin(), pred.end());
  double s = 0;
  for (auto c : labels) s += f1_of(c);
  return labels.empty() ? 0.0 : s / static_cast<double>(labels.size());
}

std::optional<double> binary_auc(const std::vector<bool>& positive, const std::vector<double>& score) {
  const std::size_t n = positive.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return score[a] < score[b]; });
  double rank_sum = 0, n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && score[idx[j]] == score[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (positive[idx[k]]) {
        rank_sum += avg_rank;
        n_pos += 1;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  return (rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg);
}

std::optional<double> roc_auc(const std::vector<std::size_t>& truth, const Matrix& proba) {
  auto column_auc = [&](std::size_t c) {
    std::vector<bool> pos(truth.size());
    std::vector<double> score(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
      pos[i] = truth[i] == c;
      score[i] = proba(i, c);
    }
    return binary_auc(pos, score);
  };
  if (proba.cols == 2) return column_auc(1);
  double s = 0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < proba.cols; ++c) {
    if (const auto a = column_auc(c)) {
      s += *a;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return s / static_cast<double>(n);
}

double mape(const std::vector<double>& truth, const std::vector<double>& pred) {
  if (truth.empty()) throw std::invalid_argument("mape: empty input");
  double s = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    s += std::abs(truth[i] - pred[i]) / std::max(std::abs(truth[i]), std::numeric_limits<double>::epsilon());
  }
  return s / static_cast<double>(truth.size());
}

double explained_variance(const std::vector<double>& truth, const std::vector<double>& pred) {
  std::vector<double> resid(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) resid[i] = truth[i] - pred[i];
  const double mt = mean_of(truth), mr = mean_of(resid);
  double vt = 0, vr = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    vt += (truth[i] - mt) * (truth[i] - mt);
    vr += (resid[i] - mr) * (resid[i] - mr);
  }
  if (vt == 0) return vr == 0 ? 1.0 : 0.0;
  return 1 - vr / vt;
}

double r2_score(const std::vector<double>& truth, const std::vector<double>& pred) {
  const double mt = mean_of(truth);
  double tot = 0, res = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    tot += (truth[i] - mt) * (truth[i] - mt);
    res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
  }
  if (tot == 0) return res == 0 ? 1.0 : 0.0;
  return 1 - res / tot;
}

std::vector<std::string> ml_metric_names(Task task) {
  if (task == Task::classification) return {"accuracy", "f1", "auc"};
  if (task == Task::regression) return {"mape", "evs", "r2"};
  return {};
}

namespace {

struct Supervised {
  Matrix x;
  std::vector<double> y;
};

Supervised prepare(const Table& table, const Featurizer& f, const ColumnSpec& target_spec, std::size_t target,
                   std::vector<std::string>& warnings, const char* label) {
  Supervised s;
  std::vector<std::size_t> keep;
  const auto& col = table.columns.at(target);
  for (std::size_t r = 0; r < col.size(); ++r) {
    if (target_spec.is_categorical() || numeric_cell(target_spec, col[r])) keep.push_back(r);
  }
  if (keep.size() != col.size()) {
    warnings.push_back(std::string(label) + ": " + std::to_string(col.size() - keep.size()) +
                       " rows without a numeric target dropped");
  }
  const Table kept = keep.size() == col.size() ? table : table.select_rows(keep);
  s.x = f.transform(kept);
  s.y = kept.columns[target];
  return s;
}

std::vector<std::size_t> labels_of(const std::vector<double>& y) {
  std::vector<std::size_t> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = static_cast<std::size_t>(y[i]);
  return out;
}

std::map<std::string, double> classification_scores(const Classifier& model, const Matrix& x,
                                                    const std::vector<std::size_t>& truth, std::size_t k,
                                                    std::vector<std::string>& warnings) {
  const Matrix p = model.predict_proba(x);
  const auto pred = argmax_rows(p);
  std::map<std::string, double> out{{"accuracy", accuracy(truth, pred)}, {"f1", f1_score(truth, pred, k)}};
  if (const auto auc = roc_auc(truth, p)) {
    out["auc"] = *auc;
  } else {
    warnings.push_back(model.name() + ": AUC undefined on the test split");
  }
  return out;
}

}  // namespace

MlUtility ml_utility(const Table& real_train, const Table& synth, const Table& test, const TableSchema& schema,
                     std::uint64_t seed) {
  const auto target = schema.target_index();
  if (!target) throw std::invalid_argument("ml_utility: schema has no target column");
  const auto& tspec = schema[*target];
  MlUtility out;
  out.task = tspec.task != Task::none ? tspec.task
                                      : (tspec.is_categorical() ? Task::classification : Task::regression);
  if (out.task == Task::classification && !tspec.is_categorical()) {
    throw std::invalid_argument("ml_utility: classification target must be categorical");
  }
  const Featurizer f(real_train, schema);
  const auto a = prepare(real_train, f, tspec, *target, out.warnings, "real_train");
  const auto b = prepare(synth, f, tspec, *target, out.warnings, "synth");
  const auto t = prepare(test, f, tspec, *target, out.warnings, "test");
  if (a.y.empty() || b.y.empty() || t.y.empty()) throw std::invalid_argument("ml_utility: empty table");

  if (out.task == Task::classification) {
    const std::size_t k = tspec.vocabulary.size();
    const auto ya = labels_of(a.y), yb = labels_of(b.y), yt = labels_of(t.y);
    const std::set<std::size_t> in_real(ya.begin(), ya.end()), in_synth(yb.begin(), yb.end());
    const bool missing_class = !std::includes(in_synth.begin(), in_synth.end(), in_real.begin(), in_real.end());
    if (missing_class) out.warnings.push_back("synth lacks target classes present in real_train");
    auto real_models = default_classifiers(seed), synth_models = default_classifiers(seed);
    for (std::size_t m = 0; m < real_models.size(); ++m) {
      real_models[m]->fit(a.x, ya, k);
      synth_models[m]->fit(b.x, yb, k);
      LearnerScores s;
      s.learner = real_models[m]->name();
      s.real = classification_scores(*real_models[m], t.x, yt, k, out.warnings);
      s.synth = classification_scores(*synth_models[m], t.x, yt, k, out.warnings);
      s.degenerate = missing_class;
      out.learners.push_back(std::move(s));
    }
  } else {
    auto real_models = default_regressors(), synth_models = default_regressors();
    for (std::size_t m = 0; m < real_models.size(); ++m) {
      real_models[m]->fit(a.x, a.y);
      synth_models[m]->fit(b.x, b.y);
      LearnerScores s;
      s.learner = real_models[m]->name();
      for (auto* side : {&s.real, &s.synth}) {
        const auto pred = (side == &s.real ? real_models : synth_models)[m]->predict(t.x);
        *side = {{"mape", mape(t.y, pred)}, {"evs", explained_variance(t.y, pred)}, {"r2", r2_score(t.y, pred)}};
      }
      out.learners.push_back(std::move(s));
    }
  }

  for (const auto& metric : ml_metric_names(out.task)) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& s : out.learners) {
      const auto r = s.real.find(metric), q = s.synth.find(metric);
      if (r == s.real.end() || q == s.synth.end()) continue;
      sum += std::abs(r->second - q->second);
      ++n;
    }
    if (n > 0) out.deltas[metric] = sum / static_cast<double>(n);
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_rows(const Table& table, const TableSchema& schema,
                                                                         double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0 && test_fraction < 1)) throw std::invalid_argument("split fraction must lie in (0, 1)");
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> groups;
  const auto target = schema.target_index();
  if (target && schema[*target].is_categorical()) {
    groups.resize(schema[*target].vocabulary.size());
    for (std::size_t r = 0; r < table.rows(); ++r) {
      groups.at(static_cast<std::size_t>(table.columns[*target][r])).push_back(r);
    }
  } else {
    groups.emplace_back(table.rows());
    std::iota(groups[0].begin(), groups[0].end(), 0);
  }
  std::vector<std::size_t> train, test;
  for (auto& g : groups) {
    for (std::size_t i = g.size(); i > 1; --i) std::swap(g[i - 1], g[rng.index(i)]);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(g.size())));
    test.insert(test.end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(n_test));
    train.insert(train.end(), g.begin() + static_cast<std::ptrdiff_t>(n_test), g.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

}  // namespace fctgan

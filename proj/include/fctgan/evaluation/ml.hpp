#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fctgan/encoding/table.hpp"

namespace fctgan {

/// Numeric design matrix built from a table's non-target columns.
/// Numeric cells are standardized with statistics from the fitting table;
/// categorical columns and mixed-column special values become indicator
/// columns. Missing numeric cells become 0 after standardization.
class Featurizer {
 public:
  Featurizer() = default;
  Featurizer(const Table& table, const TableSchema& schema);

  Matrix transform(const Table& table) const;
  std::size_t width() const { return width_; }

 private:
  struct Column {
    std::size_t index = 0;
    ColumnKind kind = ColumnKind::continuous;
    double mean = 0, scale = 1;
    std::vector<double> indicators;  // category codes or special values
    bool missing = false;
  };
  std::vector<Column> columns_;
  std::size_t width_ = 0;
};

/// Classifier interface: class-probability rows for `n_classes` classes.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::string name() const = 0;
  virtual void fit(const Matrix& x, const std::vector<std::size_t>& y, std::size_t n_classes) = 0;
  virtual Matrix predict_proba(const Matrix& x) const = 0;
};

class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual std::string name() const = 0;
  virtual void fit(const Matrix& x, const std::vector<double>& y) = 0;
  virtual std::vector<double> predict(const Matrix& x) const = 0;
};

struct LogisticOptions {
  std::size_t iterations = 300;
  double learning_rate = 0.5;
  double l2 = 1e-4;
};
struct TreeOptions {
  std::size_t max_depth = 6;
  std::size_t min_leaf = 5;
};
struct MlpOptions {
  std::size_t hidden = 32;
  std::size_t iterations = 300;
  double learning_rate = 1e-2;
  std::uint64_t seed = 0;
};

std::unique_ptr<Classifier> make_logistic(LogisticOptions options = {});
std::unique_ptr<Classifier> make_tree(TreeOptions options = {});
std::unique_ptr<Classifier> make_mlp(MlpOptions options = {});

std::unique_ptr<Regressor> make_least_squares();
std::unique_ptr<Regressor> make_ridge(double alpha = 1.0);
std::unique_ptr<Regressor> make_lasso(double alpha = 0.01, std::size_t sweeps = 500);

/// Built-in learner sets, in report order.
std::vector<std::unique_ptr<Classifier>> default_classifiers(std::uint64_t seed);
std::vector<std::unique_ptr<Regressor>> default_regressors();

double accuracy(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& pred);
/// Binary F1 of class 1 when n_classes == 2, otherwise macro F1 over the
/// classes that occur in `truth` or `pred`.
double f1_score(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& pred, std::size_t n_classes);
/// Binary AUC of class 1's score when n_classes == 2, otherwise one-vs-rest
/// macro AUC over classes with both positives and negatives in `truth`.
/// nullopt when no class qualifies.
std::optional<double> roc_auc(const std::vector<std::size_t>& truth, const Matrix& proba);
/// Mann-Whitney AUC with average ranks for ties.
std::optional<double> binary_auc(const std::vector<bool>& positive, const std::vector<double>& score);

double mape(const std::vector<double>& truth, const std::vector<double>& pred);
double explained_variance(const std::vector<double>& truth, const std::vector<double>& pred);
double r2_score(const std::vector<double>& truth, const std::vector<double>& pred);

struct LearnerScores {
  std::string learner;
  std::map<std::string, double> real;
  std::map<std::string, double> synth;
  bool degenerate = false;
};

struct MlUtility {
  Task task = Task::none;
  /// Per metric, |real - synth| averaged over learners.
  std::map<std::string, double> deltas;
  std::vector<LearnerScores> learners;
  std::vector<std::string> warnings;
};

/// Metric names in report order for a task.
std::vector<std::string> ml_metric_names(Task task);

/// Trains the built-in learners on `real_train` and on `synth`, scores both on
/// `test`. Throws std::invalid_argument when the schema has no target.
MlUtility ml_utility(const Table& real_train, const Table& synth, const Table& test, const TableSchema& schema,
                     std::uint64_t seed = 0);

/// Random train/test split; stratified on the target for classification.
/// Returns (train rows, test rows), each in ascending order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_rows(const Table& table, const TableSchema& schema,
                                                                         double test_fraction, std::uint64_t seed);

}  // namespace fctgan

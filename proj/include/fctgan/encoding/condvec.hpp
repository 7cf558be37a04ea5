#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "fctgan/encoding/table.hpp"
#include "fctgan/encoding/transformer.hpp"
#include "fctgan/numerics/rng.hpp"

namespace fctgan {

/// One hot bit of the conditional vector: category or mode `index` of
/// schema column `column`, stored at position `bit`.
struct CondVector {
  std::size_t column = 0;
  std::size_t index = 0;
  std::size_t bit = 0;
};

enum class CondLaw {
  log_smoothed,  // probability proportional to log(1 + count)
  empirical,     // proportional to count
};

/// Conditional-vector sampler over the eligible columns of a layout, with a
/// per-(column, index) row index for drawing matching real rows.
class CondSampler {
 public:
  CondSampler() = default;
  /// Counts and row index come from the one-hot argmax of each encoded row.
  CondSampler(const EncodedLayout& layout, const Matrix& encoded);

  bool enabled() const { return d_cv_ > 0; }
  std::size_t width() const { return d_cv_; }

  /// Column uniform among eligible ones, index from `law`. Throws when d_cv == 0.
  CondVector sample(Rng& rng, CondLaw law = CondLaw::log_smoothed) const;
  /// Explicit condition; throws std::out_of_range for a bad column or index.
  CondVector fixed(std::size_t column, std::size_t index) const;

  /// Uniform draw among encoded rows matching `cv`; falls back to any row
  /// when none matches.
  std::size_t sample_row(const CondVector& cv, Rng& rng) const;

  std::vector<double> probabilities(std::size_t column, CondLaw law) const;
  const std::vector<std::size_t>& counts(std::size_t column) const;
  std::size_t rows() const { return rows_; }

  nlohmann::json to_json() const;
  /// Restores counts only; sample_row then picks uniformly over all rows.
  static CondSampler from_json(const nlohmann::json& j);

 private:
  struct Entry {
    std::size_t column = 0;
    std::size_t cv_offset = 0;
    std::vector<std::size_t> counts;
    std::vector<std::vector<std::size_t>> rows;
  };

  const Entry& entry(std::size_t column) const;

  std::vector<Entry> entries_;
  std::size_t d_cv_ = 0;
  std::size_t rows_ = 0;
};

/// Writes the one-hot conditional vector into `dst` (length d_cv).
void write_condvec(const CondVector& cv, std::span<double> dst);

}  // namespace fctgan

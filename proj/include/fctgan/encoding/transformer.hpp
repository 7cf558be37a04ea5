#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "fctgan/encoding/schema.hpp"
#include "fctgan/encoding/table.hpp"
#include "fctgan/encoding/vgm.hpp"
#include "fctgan/numerics/ops.hpp"

namespace fctgan {

enum class SegmentRole { scalar_alpha, mode_onehot, cat_onehot, minmax_scalar };

struct LayoutSegment {
  SegmentRole role;
  std::size_t offset = 0;  // absolute, in the encoded row
  std::size_t width = 0;

  bool is_onehot() const { return role == SegmentRole::mode_onehot || role == SegmentRole::cat_onehot; }
};

struct ColumnSpan {
  std::size_t column = 0;  // schema index
  std::size_t offset = 0;
  std::size_t width = 0;
  std::vector<LayoutSegment> segments;
  bool cond_eligible = false;
  std::size_t cv_offset = 0;  // valid when cond_eligible

  /// The column's one-hot segment, if it has one.
  std::optional<LayoutSegment> onehot() const;
};

struct EncodedLayout {
  std::vector<ColumnSpan> columns;  // schema order
  std::size_t d_enc = 0;
  std::size_t d_cv = 0;

  std::vector<LayoutSegment> segments() const;
  /// Every segment as a softmax tiling unit: one-hot segments whole, scalars singly.
  std::vector<ops::Segment> tiling() const;
  /// Schema indices of the conditionable columns.
  std::vector<std::size_t> eligible_columns() const;
};

/// Fitted per-column state.
struct ColumnCodec {
  ColumnSpec spec;
  VgmParams vgm;                // continuous and mixed
  std::vector<double> specials;  // mixed slots, NaN first when missing is declared
  double lo = 0.0;              // minmax
  double hi = 0.0;
  int decimals = -1;

  std::size_t onehot_width() const;
};

/// Contiguous spans in schema order; d_cv sums the one-hot widths of
/// categorical, continuous, and mixed columns.
EncodedLayout build_layout(const std::vector<ColumnCodec>& codecs);

class DataTransformer {
 public:
  DataTransformer() = default;

  /// Fits every column encoder on `table`.
  static DataTransformer fit(const Table& table, const TableSchema& schema, const VgmOptions& options, Rng& rng);

  const TableSchema& schema() const { return schema_; }
  const EncodedLayout& layout() const { return layout_; }
  const std::vector<ColumnCodec>& codecs() const { return codecs_; }

  Matrix encode(const Table& table, Rng& rng) const;
  std::vector<double> encode_row(const Table& table, std::size_t row, Rng& rng) const;

  /// One-hot segments are read by argmax, so activated generator output
  /// decodes as well as exact encodings.
  Table decode(const Matrix& encoded) const;

  nlohmann::json to_json() const;
  static DataTransformer from_json(const nlohmann::json& j);

 private:
  TableSchema schema_;
  std::vector<ColumnCodec> codecs_;
  EncodedLayout layout_;
};

}  // namespace fctgan

#include "fctgan/encoding/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fctgan/encoding/codec.hpp"

namespace fctgan {

std::optional<LayoutSegment> ColumnSpan::onehot() const {
  for (const auto& s : segments) {
    if (s.is_onehot()) return s;
  }
  return std::nullopt;
}

std::vector<LayoutSegment> EncodedLayout::segments() const {
  std::vector<LayoutSegment> out;
  for (const auto& c : columns) out.insert(out.end(), c.segments.begin(), c.segments.end());
  return out;
}

std::vector<ops::Segment> EncodedLayout::tiling() const {
  std::vector<ops::Segment> out;
  for (const auto& s : segments()) {
    if (s.is_onehot()) {
      out.push_back({s.offset, s.width});
    } else {
      for (std::size_t i = 0; i < s.width; ++i) out.push_back({s.offset + i, 1});
    }
  }
  return out;
}

std::vector<std::size_t> EncodedLayout::eligible_columns() const {
  std::vector<std::size_t> out;
  for (const auto& c : columns) {
    if (c.cond_eligible) out.push_back(c.column);
  }
  return out;
}

std::size_t ColumnCodec::onehot_width() const {
  switch (spec.kind) {
    case ColumnKind::continuous: return vgm.modes();
    case ColumnKind::categorical: return spec.vocabulary.size();
    case ColumnKind::mixed: return specials.size() + vgm.modes();
    case ColumnKind::minmax: return 0;
  }
  return 0;
}

EncodedLayout build_layout(const std::vector<ColumnCodec>& codecs) {
  EncodedLayout layout;
  std::size_t off = 0;
  for (std::size_t i = 0; i < codecs.size(); ++i) {
    const auto& c = codecs[i];
    ColumnSpan span;
    span.column = i;
    span.offset = off;
    switch (c.spec.kind) {
      case ColumnKind::continuous:
      case ColumnKind::mixed:
        span.segments.push_back({SegmentRole::scalar_alpha, off, 1});
        span.segments.push_back({SegmentRole::mode_onehot, off + 1, c.onehot_width()});
        break;
      case ColumnKind::categorical:
        span.segments.push_back({SegmentRole::cat_onehot, off, c.onehot_width()});
        break;
      case ColumnKind::minmax:
        span.segments.push_back({SegmentRole::minmax_scalar, off, 1});
        break;
    }
    for (const auto& s : span.segments) span.width += s.width;
    off += span.width;
    if (c.spec.kind != ColumnKind::minmax) {
      span.cond_eligible = true;
      span.cv_offset = layout.d_cv;
      layout.d_cv += c.onehot_width();
    }
    layout.columns.push_back(std::move(span));
  }
  layout.d_enc = off;
  return layout;
}

namespace {

VgmParams fit_column_vgm(const std::vector<double>& values, const VgmOptions& options, Rng& rng) {
  if (values.empty()) return VgmParams{{1.0}, {0.0}, {1.0}};
  if (values.size() == 1) return VgmParams{{1.0}, {values[0]}, {options.sigma_floor}};
  return fit_vgm(values, options, rng);
}

}  // namespace

DataTransformer DataTransformer::fit(const Table& table, const TableSchema& schema, const VgmOptions& options,
                                     Rng& rng) {
  schema.validate();
  check_table(table, schema);
  DataTransformer t;
  t.schema_ = schema;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const auto& spec = schema[c];
    const auto& col = table.columns[c];
    ColumnCodec codec;
    codec.spec = spec;
    VgmOptions opt = options;
    if (spec.max_modes) opt.max_modes = *spec.max_modes;
    switch (spec.kind) {
      case ColumnKind::continuous:
        codec.vgm = fit_column_vgm(col, opt, rng);
        break;
      case ColumnKind::mixed: {
        if (spec.missing) codec.specials.push_back(std::numeric_limits<double>::quiet_NaN());
        codec.specials.insert(codec.specials.end(), spec.specials.begin(), spec.specials.end());
        std::vector<double> ordinary;
        for (double v : col) {
          if (special_slot(v, codec.specials) == codec.specials.size()) ordinary.push_back(v);
        }
        codec.vgm = fit_column_vgm(ordinary, opt, rng);
        break;
      }
      case ColumnKind::minmax: {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double v : col) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        if (col.empty()) lo = hi = 0.0;
        codec.lo = spec.min.value_or(lo);
        codec.hi = spec.max.value_or(hi);
        codec.decimals = detect_decimals(col);
        break;
      }
      case ColumnKind::categorical:
        break;
    }
    t.codecs_.push_back(std::move(codec));
  }
  t.layout_ = build_layout(t.codecs_);
  return t;
}

std::vector<double> DataTransformer::encode_row(const Table& table, std::size_t r, Rng& rng) const {
  std::vector<double> out(layout_.d_enc, 0.0);
  for (std::size_t c = 0; c < codecs_.size(); ++c) {
    const auto& codec = codecs_[c];
    const auto& span = layout_.columns[c];
    const double v = table.columns[c][r];
    double* dst = out.data() + span.offset;
    switch (codec.spec.kind) {
      case ColumnKind::continuous: {
        const auto code = encode_continuous(v, codec.vgm, rng);
        dst[0] = code.alpha;
        dst[1 + code.mode] = 1.0;
        break;
      }
      case ColumnKind::mixed: {
        const auto code = encode_mixed(v, codec.specials, codec.vgm, rng);
        dst[0] = code.alpha;
        dst[1 + code.slot] = 1.0;
        break;
      }
      case ColumnKind::categorical:
        dst[static_cast<std::size_t>(v)] = 1.0;
        break;
      case ColumnKind::minmax:
        dst[0] = encode_minmax(v, codec.lo, codec.hi);
        break;
    }
  }
  return out;
}

Matrix DataTransformer::encode(const Table& table, Rng& rng) const {
  check_table(table, schema_);
  Matrix m(table.rows(), layout_.d_enc);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const auto row = encode_row(table, r, rng);
    std::copy(row.begin(), row.end(), m.row(r));
  }
  return m;
}

Table DataTransformer::decode(const Matrix& encoded) const {
  if (encoded.cols != layout_.d_enc) {
    throw DataError("encoded width " + std::to_string(encoded.cols) + " does not match layout width " +
                    std::to_string(layout_.d_enc));
  }
  Table out = Table::empty(codecs_.size());
  for (auto& col : out.columns) col.resize(encoded.rows);
  for (std::size_t r = 0; r < encoded.rows; ++r) {
    const double* row = encoded.row(r);
    for (std::size_t c = 0; c < codecs_.size(); ++c) {
      const auto& codec = codecs_[c];
      const auto& span = layout_.columns[c];
      const double* src = row + span.offset;
      double v = 0;
      switch (codec.spec.kind) {
        case ColumnKind::continuous:
          v = decode_continuous(src[0], argmax({src + 1, codec.vgm.modes()}), codec.vgm);
          break;
        case ColumnKind::mixed:
          v = decode_mixed(src[0], argmax({src + 1, codec.onehot_width()}), codec.specials, codec.vgm);
          break;
        case ColumnKind::categorical:
          v = static_cast<double>(argmax({src, codec.onehot_width()}));
          break;
        case ColumnKind::minmax:
          v = decode_minmax(src[0], codec.lo, codec.hi, codec.decimals);
          break;
      }
      out.columns[c][r] = v;
    }
  }
  return out;
}

nlohmann::json DataTransformer::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : codecs_) {
    nlohmann::json jc{{"name", c.spec.name}};
    if (c.spec.kind == ColumnKind::continuous || c.spec.kind == ColumnKind::mixed) jc["vgm"] = vgm_to_json(c.vgm);
    if (c.spec.kind == ColumnKind::minmax) {
      jc["lo"] = c.lo;
      jc["hi"] = c.hi;
      jc["decimals"] = c.decimals;
    }
    cols.push_back(std::move(jc));
  }
  return nlohmann::json{{"schema", schema_to_json(schema_)}, {"columns", cols}};
}

DataTransformer DataTransformer::from_json(const nlohmann::json& j) {
  DataTransformer t;
  t.schema_ = schema_from_json(j.at("schema"));
  const auto& cols = j.at("columns");
  if (cols.size() != t.schema_.size()) throw SchemaError("encoder state does not match its schema");
  for (std::size_t c = 0; c < t.schema_.size(); ++c) {
    ColumnCodec codec;
    codec.spec = t.schema_[c];
    const auto& jc = cols[c];
    if (jc.at("name").get<std::string>() != codec.spec.name) throw SchemaError("encoder column order mismatch");
    if (jc.contains("vgm")) codec.vgm = vgm_from_json(jc["vgm"]);
    if (codec.spec.kind == ColumnKind::mixed) {
      if (codec.spec.missing) codec.specials.push_back(std::numeric_limits<double>::quiet_NaN());
      codec.specials.insert(codec.specials.end(), codec.spec.specials.begin(), codec.spec.specials.end());
    }
    if (codec.spec.kind == ColumnKind::minmax) {
      codec.lo = jc.at("lo").get<double>();
      codec.hi = jc.at("hi").get<double>();
      codec.decimals = jc.at("decimals").get<int>();
    }
    t.codecs_.push_back(std::move(codec));
  }
  t.layout_ = build_layout(t.codecs_);
  return t;
}

}  // namespace fctgan

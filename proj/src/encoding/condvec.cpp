#include "fctgan/encoding/condvec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fctgan/encoding/codec.hpp"

namespace fctgan {

CondSampler::CondSampler(const EncodedLayout& layout, const Matrix& encoded) : d_cv_(layout.d_cv), rows_(encoded.rows) {
  for (const auto& span : layout.columns) {
    if (!span.cond_eligible) continue;
    const auto seg = *span.onehot();
    Entry e;
    e.column = span.column;
    e.cv_offset = span.cv_offset;
    e.counts.assign(seg.width, 0);
    e.rows.resize(seg.width);
    for (std::size_t r = 0; r < encoded.rows; ++r) {
      const std::size_t k = argmax({encoded.row(r) + seg.offset, seg.width});
      ++e.counts[k];
      e.rows[k].push_back(r);
    }
    entries_.push_back(std::move(e));
  }
}

const CondSampler::Entry& CondSampler::entry(std::size_t column) const {
  for (const auto& e : entries_) {
    if (e.column == column) return e;
  }
  throw std::out_of_range("column " + std::to_string(column) + " is not conditionable");
}

std::vector<double> CondSampler::probabilities(std::size_t column, CondLaw law) const {
  const auto& e = entry(column);
  std::vector<double> p(e.counts.size());
  double total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double c = static_cast<double>(e.counts[i]);
    p[i] = law == CondLaw::log_smoothed ? std::log1p(c) : c;
    total += p[i];
  }
  if (total <= 0) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
  } else {
    for (double& v : p) v /= total;
  }
  return p;
}

const std::vector<std::size_t>& CondSampler::counts(std::size_t column) const { return entry(column).counts; }

CondVector CondSampler::sample(Rng& rng, CondLaw law) const {
  if (!enabled()) throw std::logic_error("conditional sampling is disabled (d_cv = 0)");
  const auto& e = entries_[rng.index(entries_.size())];
  const auto p = probabilities(e.column, law);
  const std::size_t k = rng.categorical(p);
  return CondVector{e.column, k, e.cv_offset + k};
}

CondVector CondSampler::fixed(std::size_t column, std::size_t index) const {
  const auto& e = entry(column);
  if (index >= e.counts.size()) throw std::out_of_range("condition index out of range");
  return CondVector{column, index, e.cv_offset + index};
}

std::size_t CondSampler::sample_row(const CondVector& cv, Rng& rng) const {
  if (rows_ == 0) throw std::logic_error("sampler has no rows");
  const auto& e = entry(cv.column);
  if (cv.index < e.rows.size() && !e.rows[cv.index].empty()) {
    const auto& rows = e.rows[cv.index];
    return rows[rng.index(rows.size())];
  }
  return rng.index(rows_);
}

nlohmann::json CondSampler::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : entries_) {
    entries.push_back({{"column", e.column}, {"cv_offset", e.cv_offset}, {"counts", e.counts}});
  }
  return nlohmann::json{{"d_cv", d_cv_}, {"rows", rows_}, {"entries", entries}};
}

CondSampler CondSampler::from_json(const nlohmann::json& j) {
  CondSampler s;
  s.d_cv_ = j.at("d_cv").get<std::size_t>();
  s.rows_ = j.at("rows").get<std::size_t>();
  for (const auto& je : j.at("entries")) {
    Entry e;
    e.column = je.at("column").get<std::size_t>();
    e.cv_offset = je.at("cv_offset").get<std::size_t>();
    e.counts = je.at("counts").get<std::vector<std::size_t>>();
    e.rows.resize(e.counts.size());
    s.entries_.push_back(std::move(e));
  }
  return s;
}

void write_condvec(const CondVector& cv, std::span<double> dst) {
  std::fill(dst.begin(), dst.end(), 0.0);
  dst[cv.bit] = 1.0;
}

}  // namespace fctgan

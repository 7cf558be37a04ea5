#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fctgan/encoding/schema.hpp"

namespace fctgan {

/// Column-major table of values. Categorical cells hold the vocabulary index;
/// NaN marks a missing cell (only legal in mixed columns declaring `missing`).
struct Table {
  std::vector<std::vector<double>> columns;

  std::size_t cols() const { return columns.size(); }
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

  static Table empty(std::size_t cols) { return Table{std::vector<std::vector<double>>(cols)}; }

  Table select_rows(const std::vector<std::size_t>& rows) const;
  Table permuted(const std::vector<std::size_t>& order) const;
};

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  double* row(std::size_t r) { return data.data() + r * cols; }
};

inline bool is_missing(double v) { return std::isnan(v); }

/// Throws DataError when a cell violates its column's kind.
void check_table(const Table& table, const TableSchema& schema);

// CSV with a header row, comma separated, double-quoted fields allowed.
// Header names must match the schema (in any order); columns are returned in
// schema order. Errors name the column and the 1-based data row.
Table read_csv(const std::string& path, const TableSchema& schema);
Table parse_csv(const std::string& text, const TableSchema& schema);

/// Writes the header and rows in schema order, shortest round-trip numbers.
std::string format_csv(const Table& table, const TableSchema& schema);
void write_csv(const std::string& path, const Table& table, const TableSchema& schema);

std::string format_number(double v);

/// Writes to a temporary sibling, then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace fctgan

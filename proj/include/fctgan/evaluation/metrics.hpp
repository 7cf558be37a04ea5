#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fctgan/encoding/table.hpp"

namespace fctgan {

/// Jensen-Shannon divergence (log base 2) between two count vectors over the
/// same categories.
double jsd(std::span<const double> p_counts, std::span<const double> q_counts);

/// Mean JSD over categorical columns; nullopt when there are none.
std::optional<double> avg_jsd(const Table& real, const Table& synth, const TableSchema& schema);

/// Wasserstein-1 distance between two empirical samples (any sizes).
double wasserstein1(std::vector<double> a, std::vector<double> b);

/// Mean W1 over continuous, minmax, and mixed columns (mixed: numeric cells
/// only), each min-max scaled by the real column's bounds. Columns that are
/// constant in the real data are skipped and named in `warnings`. nullopt when
/// no column qualifies.
std::optional<double> avg_wd(const Table& real, const Table& synth, const TableSchema& schema,
                             std::vector<std::string>* warnings = nullptr);

/// Association matrix, row-major n x n:
///   numeric-numeric      Pearson r
///   categorical pairs    uncertainty coefficient U(row | col), natural logs
///   categorical-numeric  correlation ratio eta, same value in both cells
/// Diagonal is 1. Mixed columns use their numeric cells only. Zero-variance
/// numeric columns get 0 entries and a warning. Needs at least 2 columns and
/// 3 rows.
Matrix corr_matrix(const Table& table, const TableSchema& schema, std::vector<std::string>* warnings = nullptr);

/// Root-sum-square of the off-diagonal differences of the two corr matrices.
double diff_corr(const Table& real, const Table& synth, const TableSchema& schema);

/// max(L) - min(L). Needs at least 2 values.
double mav(std::span<const double> values);
/// MAV / min(L) * 100; nullopt when min(L) == 0. Needs at least 2 values.
std::optional<double> normalized_mav(std::span<const double> values);

}  // namespace fctgan

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "isodist/condensed_matrix.hpp"
#include "isodist/dataset.hpp"

namespace isodist {

// Numeric columns as an n x p matrix; throws std::invalid_argument when a
// column is categorical or has missing cells.
Eigen::MatrixXd numeric_matrix(const Dataset& ds);

struct CovarianceModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // n - 1 denominator
  Eigen::MatrixXd inverse;     // Moore-Penrose pseudo-inverse
  // W with W W' = inverse; (x - mean)' W has identity covariance on the
  // retained subspace.
  Eigen::MatrixXd whitening;
  Eigen::Index rank = 0;
};

// Eigenvalues below 1e-10 times the largest are treated as zero.
CovarianceModel fit_covariance(const Eigen::MatrixXd& x);

CondensedMatrix euclidean_matrix(const Dataset& ds);

// sqrt((x - y)' S^+ (x - y)) with S estimated from `ds`. Appends a warning
// when n < p + 1.
CondensedMatrix mahalanobis_matrix(const Dataset& ds, std::vector<std::string>* warnings = nullptr);

// 1 - cos(angle); throws for a zero-norm row.
CondensedMatrix cosine_distance_matrix(const Dataset& ds);

// Mean over jointly observed columns of |x_i - x_j| / range (numeric) or a 0/1
// mismatch (categorical). NaN when a pair shares no observed column.
// Zero-range numeric columns are skipped with a warning.
CondensedMatrix gower_matrix(const Dataset& ds, std::vector<std::string>* warnings = nullptr);

// Numeric missing -> column mean, categorical missing -> most frequent code
// (lowest code on ties). Throws when a column is entirely missing.
Dataset mean_impute(const Dataset& ds);

// Pearson correlation over the cells that are non-NaN in both matrices.
// Throws std::invalid_argument for mismatched sizes, fewer than two usable
// cells, or zero variance.
double pearson_corr(const CondensedMatrix& a, const CondensedMatrix& b);

// Copy of `ds` restricted to the given columns.
Dataset select_columns(const Dataset& ds, const std::vector<std::size_t>& columns);

}  // namespace isodist

#include "isodist/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace isodist {
namespace {

constexpr double kPinvTolerance = 1e-10;

CondensedMatrix row_euclidean(const Eigen::MatrixXd& x) {
  const auto n = static_cast<std::size_t>(x.rows());
  CondensedMatrix out(n);
  auto cells = out.cells();
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      cells[k++] = (x.row(i) - x.row(j)).norm();
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd numeric_matrix(const Dataset& ds) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(ds.n_rows()), static_cast<Eigen::Index>(ds.n_cols()));
  for (std::size_t j = 0; j < ds.n_cols(); ++j) {
    const auto& col = ds.column(j);
    if (!col.is_numeric()) {
      throw std::invalid_argument("column '" + col.name() + "' is categorical");
    }
    if (col.n_missing() > 0) {
      throw std::invalid_argument("column '" + col.name() + "' has missing values; impute first");
    }
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col.value(i);
    }
  }
  return x;
}

CovarianceModel fit_covariance(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw std::invalid_argument("covariance needs at least two rows");
  CovarianceModel model;
  model.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - model.mean.transpose();
  model.covariance = (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.covariance);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double cutoff = kPinvTolerance * std::max(values.maxCoeff(), 0.0);
  Eigen::VectorXd inv_values = Eigen::VectorXd::Zero(values.size());
  model.whitening = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values(k) > cutoff && values(k) > 0.0) {
      inv_values(k) = 1.0 / values(k);
      model.whitening.col(k) = eig.eigenvectors().col(k) / std::sqrt(values(k));
      ++model.rank;
    }
  }
  model.inverse = eig.eigenvectors() * inv_values.asDiagonal() * eig.eigenvectors().transpose();
  return model;
}

CondensedMatrix euclidean_matrix(const Dataset& ds) { return row_euclidean(numeric_matrix(ds)); }

CondensedMatrix mahalanobis_matrix(const Dataset& ds, std::vector<std::string>* warnings) {
  const Eigen::MatrixXd x = numeric_matrix(ds);
  if (warnings && x.rows() < x.cols() + 1) {
    warnings->push_back("mahalanobis: fewer rows than columns + 1; using the pseudo-inverse");
  }
  const CovarianceModel model = fit_covariance(x);
  const Eigen::MatrixXd centered = x.rowwise() - model.mean.transpose();
  return row_euclidean(centered * model.whitening);
}

CondensedMatrix cosine_distance_matrix(const Dataset& ds) {
  const Eigen::MatrixXd x = numeric_matrix(ds);
  const Eigen::VectorXd norms = x.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (norms(i) == 0.0) {
      throw std::invalid_argument("cosine distance undefined for zero-norm row " + std::to_string(i));
    }
  }
  const auto n = static_cast<std::size_t>(x.rows());
  CondensedMatrix out(n);
  auto cells = out.cells();
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      const double cos = x.row(i).dot(x.row(j)) / (norms(i) * norms(j));
      cells[k++] = 1.0 - std::clamp(cos, -1.0, 1.0);
    }
  }
  return out;
}

CondensedMatrix gower_matrix(const Dataset& ds, std::vector<std::string>* warnings) {
  const std::size_t n = ds.n_rows();
  std::vector<double> ranges(ds.n_cols(), 0.0);
  std::vector<bool> used(ds.n_cols(), true);
  for (std::size_t j = 0; j < ds.n_cols(); ++j) {
    const auto& col = ds.column(j);
    if (!col.is_numeric()) continue;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      if (col.is_missing(i)) continue;
      lo = std::min(lo, col.value(i));
      hi = std::max(hi, col.value(i));
    }
    if (!(hi > lo)) {
      used[j] = false;
      if (warnings) warnings->push_back("gower: column '" + col.name() + "' has zero range; skipped");
      continue;
    }
    ranges[j] = hi - lo;
  }

  CondensedMatrix out(n);
  auto cells = out.cells();
  std::size_t k = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double total = 0.0;
      std::size_t count = 0;
      for (std::size_t j = 0; j < ds.n_cols(); ++j) {
        const auto& col = ds.column(j);
        if (!used[j] || col.is_missing(a) || col.is_missing(b)) continue;
        total += col.is_numeric() ? std::abs(col.value(a) - col.value(b)) / ranges[j]
                                  : (col.code(a) != col.code(b) ? 1.0 : 0.0);
        ++count;
      }
      cells[k++] = count ? total / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

Dataset mean_impute(const Dataset& ds) {
  std::vector<Column> columns;
  columns.reserve(ds.n_cols());
  for (const auto& col : ds.columns()) {
    const std::size_t n = col.size();
    if (col.n_missing() == n) throw std::invalid_argument("column '" + col.name() + "' is entirely missing");
    if (col.is_numeric()) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!col.is_missing(i)) sum += col.value(i);
      }
      const double mean = sum / static_cast<double>(n - col.n_missing());
      std::vector<double> values(col.values().begin(), col.values().end());
      for (std::size_t i = 0; i < n; ++i) {
        if (col.is_missing(i)) values[i] = mean;
      }
      columns.push_back(Column::numeric(col.name(), std::move(values), std::vector<std::uint8_t>(n, 0)));
    } else {
      std::vector<std::size_t> counts(col.n_categories(), 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (!col.is_missing(i)) ++counts[static_cast<std::size_t>(col.code(i))];
      }
      const auto mode = static_cast<std::int32_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
      std::vector<std::int32_t> codes(col.codes().begin(), col.codes().end());
      for (std::size_t i = 0; i < n; ++i) {
        if (col.is_missing(i)) codes[i] = mode;
      }
      columns.push_back(Column::categorical(col.name(), std::move(codes), std::vector<std::uint8_t>(n, 0),
                                            col.labels()));
    }
  }
  return Dataset(std::move(columns),
                 std::vector<double>(ds.row_weights().begin(), ds.row_weights().end()));
}

double pearson_corr(const CondensedMatrix& a, const CondensedMatrix& b) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson_corr: matrices differ in size");
  const auto xa = a.cells();
  const auto xb = b.cells();
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < xa.size(); ++k) {
    if (std::isnan(xa[k]) || std::isnan(xb[k])) continue;
    mean_a += xa[k];
    mean_b += xb[k];
    ++count;
  }
  if (count < 2) throw std::invalid_argument("pearson_corr: fewer than two jointly observed cells");
  mean_a /= static_cast<double>(count);
  mean_b /= static_cast<double>(count);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t k = 0; k < xa.size(); ++k) {
    if (std::isnan(xa[k]) || std::isnan(xb[k])) continue;
    const double da = xa[k] - mean_a;
    const double db = xb[k] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw std::invalid_argument("pearson_corr: zero variance, correlation undefined");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

Dataset select_columns(const Dataset& ds, const std::vector<std::size_t>& columns) {
  std::vector<Column> out;
  out.reserve(columns.size());
  for (auto j : columns) out.push_back(ds.column(j));
  return Dataset(std::move(out), std::vector<double>(ds.row_weights().begin(), ds.row_weights().end()));
}

}  // namespace isodist

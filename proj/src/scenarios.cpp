#include "isodist/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace isodist {
namespace {

Eigen::MatrixXd draw_gaussian(std::size_t n, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                              Rng& rng) {
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::logic_error("scenario covariance is not positive definite");
  const Eigen::MatrixXd lower = llt.matrixL();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), mean.size());
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = normal(rng);
    out.row(i) = (mean + lower * z).transpose();
  }
  return out;
}

Dataset numeric_dataset(const Eigen::MatrixXd& x) {
  std::vector<Column> cols;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    std::vector<double> values(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) values[static_cast<std::size_t>(i)] = x(i, j);
    cols.push_back(Column::numeric("x" + std::to_string(j + 1), std::move(values)));
  }
  return Dataset(std::move(cols));
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

}  // namespace

const char* to_string(ScenarioName name) noexcept {
  switch (name) {
    case ScenarioName::t1: return "t1";
    case ScenarioName::t2: return "t2";
    case ScenarioName::t3: return "t3";
    case ScenarioName::t4: return "t4";
    case ScenarioName::t5: return "t5";
    case ScenarioName::mixed: return "mixed";
  }
  return "?";
}

ScenarioName scenario_from_string(const std::string& name) {
  for (auto s : {ScenarioName::t1, ScenarioName::t2, ScenarioName::t3, ScenarioName::t4,
                 ScenarioName::t5, ScenarioName::mixed}) {
    if (name == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

ScenarioConfig ScenarioConfig::standard(ScenarioName name, std::size_t n_rows, std::uint64_t seed) {
  ScenarioConfig cfg{name, n_rows, seed, 0.0};
  if (name == ScenarioName::t4) cfg.missing_fraction = 0.15;
  if (name == ScenarioName::mixed) cfg.missing_fraction = 0.10;
  return cfg;
}

Dataset mask_cells(const Dataset& ds, double fraction, Rng& rng) {
  const std::size_t n = ds.n_rows();
  const std::size_t total = n * ds.n_cols();
  const auto n_masked = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  std::vector<std::size_t> cells(total);
  std::iota(cells.begin(), cells.end(), 0);
  for (std::size_t k = 0; k < n_masked; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, total - 1);
    std::swap(cells[k], cells[pick(rng)]);
  }
  std::vector<std::vector<std::uint8_t>> masks(ds.n_cols());
  for (std::size_t j = 0; j < ds.n_cols(); ++j) {
    const auto m = ds.column(j).missing_mask();
    masks[j].assign(m.begin(), m.end());
  }
  for (std::size_t k = 0; k < n_masked; ++k) masks[cells[k] % ds.n_cols()][cells[k] / ds.n_cols()] = 1;

  std::vector<Column> cols;
  for (std::size_t j = 0; j < ds.n_cols(); ++j) {
    const auto& col = ds.column(j);
    if (col.is_numeric()) {
      cols.push_back(Column::numeric(col.name(), {col.values().begin(), col.values().end()},
                                     std::move(masks[j])));
    } else {
      cols.push_back(Column::categorical(col.name(), {col.codes().begin(), col.codes().end()},
                                         std::move(masks[j]), col.labels()));
    }
  }
  return Dataset(std::move(cols), {ds.row_weights().begin(), ds.row_weights().end()});
}

ScenarioData generate_scenario(const ScenarioConfig& cfg, Rng& rng) {
  const std::size_t n = cfg.n_rows;
  if (n < 2) throw std::invalid_argument("scenario needs at least two rows");
  std::normal_distribution<double> normal(0.0, 1.0);

  switch (cfg.name) {
    case ScenarioName::t1:
      return {numeric_dataset(draw_gaussian(n, vec({0, 0}), Eigen::MatrixXd::Identity(2, 2), rng)), {}, {}};
    case ScenarioName::t2: {
      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
      cov(0, 0) = 1.0;
      cov(1, 1) = 100.0;
      return {numeric_dataset(draw_gaussian(n, vec({0, 0}), cov, rng)), {}, {}};
    }
    case ScenarioName::t3: {
      Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 3);
      x.leftCols(2) = draw_gaussian(n, vec({0, 0}), Eigen::MatrixXd::Identity(2, 2), rng);
      for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 2) = std::exp(x(i, 1));
      return {numeric_dataset(x), {}, {}};
    }
    case ScenarioName::t4: {
      const Eigen::VectorXd mean = vec({0.619, 2.149, 0.083, 0.113, 3.66});
      Eigen::MatrixXd cov(5, 5);
      cov << 6.17, 1.87, -2.82, -1.35, -1.48,  //
          1.87, 3.01, -1.03, -0.84, 1.56,       //
          -2.82, -1.03, 3.94, -0.8, -0.73,      //
          -1.35, -0.84, -0.8, 1.67, 0.59,       //
          -1.48, 1.56, -0.73, 0.59, 2.77;
      Dataset full = numeric_dataset(draw_gaussian(n, mean, cov, rng));
      Dataset masked = mask_cells(full, cfg.missing_fraction, rng);
      return {std::move(full), std::move(masked), {}};
    }
    case ScenarioName::t5: {
      Eigen::MatrixXd cov_a(2, 2);
      cov_a << 0.1, -0.2, -0.2, 0.5;
      Eigen::MatrixXd cov_b(2, 2);
      cov_b << 0.1, 0.2, 0.2, 0.5;
      const Eigen::MatrixXd draws_a = draw_gaussian(n, vec({-1, -1}), cov_a, rng);
      const Eigen::MatrixXd draws_b = draw_gaussian(n, vec({0.25, 0.25}), cov_b, rng);
      std::bernoulli_distribution coin(0.5);
      Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2);
      std::vector<int> groups(n);
      for (std::size_t i = 0; i < n; ++i) {
        groups[i] = coin(rng) ? 1 : 0;
        const auto r = static_cast<Eigen::Index>(i);
        x.row(r) = groups[i] == 0 ? draws_a.row(r) : draws_b.row(r);
      }
      return {numeric_dataset(x), {}, std::move(groups)};
    }
    case ScenarioName::mixed: {
      // Two latent clusters drive both numeric and categorical columns.
      std::bernoulli_distribution coin(0.5);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::vector<double> x1(n), x2(n);
      std::vector<std::int32_t> c1(n), c2(n);
      for (std::size_t i = 0; i < n; ++i) {
        const int cluster = coin(rng) ? 1 : 0;
        const double shift = cluster ? 1.5 : -1.5;
        x1[i] = shift + normal(rng);
        x2[i] = -0.5 * shift + std::exp(0.5 * normal(rng));
        // c1 in {a, b, c}: cluster 0 favours a, cluster 1 favours c.
        const double u = unif(rng);
        c1[i] = cluster == 0 ? (u < 0.6 ? 0 : (u < 0.9 ? 1 : 2)) : (u < 0.1 ? 0 : (u < 0.4 ? 1 : 2));
        c2[i] = (unif(rng) < (cluster ? 0.75 : 0.25)) ? 1 : 0;
      }
      std::vector<Column> cols;
      cols.push_back(Column::numeric("x1", std::move(x1)));
      cols.push_back(Column::numeric("x2", std::move(x2)));
      cols.push_back(Column::categorical("c1", std::move(c1), {"a", "b", "c"}));
      cols.push_back(Column::categorical("c2", std::move(c2), {"no", "yes"}));
      Dataset full(std::move(cols));
      Dataset masked = mask_cells(full, cfg.missing_fraction, rng);
      return {std::move(full), std::move(masked), {}};
    }
  }
  throw std::logic_error("unhandled scenario");
}

}  // namespace isodist

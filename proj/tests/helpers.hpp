#pragma once

// Reference implementations used as oracles by the unit and acceptance tests.
// They deliberately avoid the library's traversal code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "isodist/dataset.hpp"
#include "isodist/forest.hpp"

namespace isodist::oracle {

inline Dataset normal_cloud(std::size_t n, std::uint64_t seed, std::size_t p = 2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Column> cols;
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> v(n);
    for (auto& x : v) x = normal(rng);
    cols.push_back(Column::numeric("x" + std::to_string(j + 1), std::move(v)));
  }
  return Dataset(std::move(cols));
}

// E[s_n] straight from the combinatorial sum with binomial ratios
// C(i,2)/C(n,2), filled bottom-up with no shared code.
inline std::vector<double> combinatorial_table(std::size_t n_max) {
  auto choose2 = [](double k) { return k * (k - 1.0) / 2.0; };
  std::vector<double> e(n_max + 1, 0.0);
  if (n_max >= 2) e[2] = 1.0;
  for (std::size_t n = 3; n <= n_max; ++n) {
    const double dn = static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      const double di = static_cast<double>(i);
      sum += choose2(di) / choose2(dn) * e[i] + choose2(dn - di) / choose2(dn) * e[n - i];
    }
    e[n] = 1.0 + sum / (dn - 1.0);
  }
  return e;
}

struct MonteCarlo {
  double mean = 0.0;
  double std_error = 0.0;
};

// Grows random trees over n explicit points: a node holding m points sends a
// Uniform{1..m-1} sized uniformly random subset left. Returns the mean number
// of nodes shared by points 0 and 1 before they part.
inline MonteCarlo simulate_separation(std::size_t n, std::size_t sims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> node(n);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < sims; ++s) {
    node.resize(n);
    std::iota(node.begin(), node.end(), 0);
    int depth = 0;
    while (true) {
      ++depth;
      const std::size_t m = node.size();
      std::uniform_int_distribution<std::size_t> size_dist(1, m - 1);
      const std::size_t k = size_dist(rng);
      std::shuffle(node.begin(), node.end(), rng);
      const auto in_left = [&](int p) {
        return std::find(node.begin(), node.begin() + static_cast<std::ptrdiff_t>(k), p) !=
               node.begin() + static_cast<std::ptrdiff_t>(k);
      };
      const bool a_left = in_left(0);
      const bool b_left = in_left(1);
      if (a_left != b_left) break;
      if (a_left) {
        node.resize(k);
      } else {
        node.erase(node.begin(), node.begin() + static_cast<std::ptrdiff_t>(k));
      }
    }
    sum += depth;
    sum_sq += static_cast<double>(depth) * depth;
  }
  const double ns = static_cast<double>(sims);
  const double mean = sum / ns;
  const double var = (sum_sq - ns * mean * mean) / (ns - 1.0);
  return {mean, std::sqrt(var / ns)};
}

// Root-to-terminal node path of a fully observed row, walking the rules
// directly.
inline std::vector<std::uint32_t> row_path(const Tree& tree, const Dataset& ds, std::size_t row) {
  std::vector<std::uint32_t> path;
  std::uint32_t k = 0;
  while (true) {
    path.push_back(k);
    const TreeNode& node = tree.nodes[k];
    if (node.is_terminal()) return path;
    bool left = false;
    if (const auto* num = std::get_if<NumericSplit>(&node.rule)) {
      left = ds.column(num->var).value(row) <= num->threshold;
    } else if (const auto* cat = std::get_if<CategoricalSplit>(&node.rule)) {
      left = cat->sides.at(static_cast<std::size_t>(ds.column(cat->var).code(row))) == CategorySide::left;
    } else {
      const auto& hyp = std::get<HyperplaneSplit>(node.rule);
      double y = 0.0;
      for (const auto& term : hyp.terms) {
        const auto& col = ds.column(term.var);
        y += term.kind == ColumnKind::numeric
                 ? term.coef * col.value(row)
                 : *term.category_coefs.at(static_cast<std::size_t>(col.code(row)));
      }
      left = y <= hyp.threshold;
    }
    k = left ? node.left : node.right;
  }
}

// Separation depth of two paths: one per shared split node, 3 for a shared
// terminal.
inline double path_separation(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::size_t shared = 0;
  while (shared < a.size() && shared < b.size() && a[shared] == b[shared]) ++shared;
  if (shared == a.size() && shared == b.size()) return static_cast<double>(shared - 1) + 3.0;
  return static_cast<double>(shared);
}

}  // namespace isodist::oracle

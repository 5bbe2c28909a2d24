#include "isodist/distance.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "isodist/depth_math.hpp"
#include "isodist/parallel.hpp"

namespace isodist {
namespace {

struct Item {
  std::size_t row;
  double weight;
};

enum class Route : std::int8_t { right = 0, left = 1, both = -1 };

Route route_numeric(const NumericSplit& split, const EncodedRows& data, std::size_t row) {
  const double x = data.value(split.var, row);
  if (std::isnan(x)) return Route::both;
  return x <= split.threshold ? Route::left : Route::right;
}

Route route_categorical(const CategoricalSplit& split, const EncodedRows& data, std::size_t row) {
  const std::int32_t code = data.code(split.var, row);
  if (code < 0 || static_cast<std::size_t>(code) >= split.sides.size()) return Route::both;
  switch (split.sides[static_cast<std::size_t>(code)]) {
    case CategorySide::left:
      return Route::left;
    case CategorySide::right:
      return Route::right;
    case CategorySide::absent:
      break;
  }
  return Route::both;
}

double project(const HyperplaneSplit& split, const EncodedRows& data, std::size_t row) {
  double y = 0.0;
  for (const auto& term : split.terms) {
    if (term.kind == ColumnKind::numeric) {
      const double x = data.value(term.var, row);
      y += std::isnan(x) ? term.impute : term.coef * x;
    } else {
      const std::int32_t code = data.code(term.var, row);
      const bool known = code >= 0 && static_cast<std::size_t>(code) < term.category_coefs.size() &&
                         term.category_coefs[static_cast<std::size_t>(code)].has_value();
      y += known ? *term.category_coefs[static_cast<std::size_t>(code)] : term.impute;
    }
  }
  return y;
}

// Splits `items` between the children of a non-terminal node, keeping the
// relative row order.
void split_items(const TreeNode& node, const EncodedRows& data, const std::vector<Item>& items,
                 std::vector<Item>& left, std::vector<Item>& right) {
  if (const auto* hyper = std::get_if<HyperplaneSplit>(&node.rule)) {
    for (const auto& item : items) {
      (project(*hyper, data, item.row) <= hyper->threshold ? left : right).push_back(item);
    }
    return;
  }
  double left_fraction = 0.0;
  for (const auto& item : items) {
    Route route;
    if (const auto* num = std::get_if<NumericSplit>(&node.rule)) {
      route = route_numeric(*num, data, item.row);
      left_fraction = num->left_fraction;
    } else {
      const auto& cat = std::get<CategoricalSplit>(node.rule);
      route = route_categorical(cat, data, item.row);
      left_fraction = cat.left_fraction;
    }
    if (route == Route::left) {
      left.push_back(item);
    } else if (route == Route::right) {
      right.push_back(item);
    } else {
      const double wl = item.weight * left_fraction;
      const double wr = item.weight * (1.0 - left_fraction);
      if (wl >= kWeightFloor) left.push_back({item.row, wl});
      if (wr >= kWeightFloor) right.push_back({item.row, wr});
    }
  }
}

void add_pairs(const std::vector<Item>& items, double factor, CondensedMatrix& sums) {
  const std::size_t n = sums.size();
  double* cells = sums.cells().data();
  for (std::size_t a = 0; a + 1 < items.size(); ++a) {
    const double wa = factor * items[a].weight;
    double* row_cells = cells + CondensedMatrix::row_offset(n, items[a].row);
    for (std::size_t b = a + 1; b < items.size(); ++b) {
      row_cells[items[b].row] += wa * items[b].weight;
    }
  }
}

void traverse_node(const Tree& tree, std::uint32_t idx, const EncodedRows& data,
                   const std::vector<Item>& items, CondensedMatrix& sums) {
  const TreeNode& node = tree.nodes[idx];
  if (node.is_terminal()) {
    add_pairs(items, kSeparationDepthLimit, sums);
    return;
  }
  add_pairs(items, 1.0, sums);
  std::vector<Item> left;
  std::vector<Item> right;
  split_items(node, data, items, left, right);
  if (left.size() > 0) traverse_node(tree, node.left, data, left, sums);
  if (right.size() > 0) traverse_node(tree, node.right, data, right, sums);
}

std::vector<Item> initial_items(const EncodedRows& data, std::span<const std::size_t> rows) {
  std::vector<Item> items;
  if (rows.empty()) {
    items.reserve(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i) items.push_back({i, 1.0});
    return items;
  }
  items.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= data.n_rows() || (k > 0 && rows[k] <= rows[k - 1])) {
      throw std::invalid_argument("traversal rows must be ascending and in range");
    }
    items.push_back({rows[k], 1.0});
  }
  return items;
}

void traverse(const Tree& tree, const EncodedRows& data, std::span<const std::size_t> rows,
              PairAccumulator& acc) {
  if (acc.sums().size() != data.n_rows()) {
    throw std::invalid_argument("accumulator size does not match the data");
  }
  if (!tree.nodes.empty()) traverse_node(tree, 0, data, initial_items(data, rows), acc.sums());
  acc.count_tree();
}

bool tree_is_extended(const Tree& tree) {
  return !tree.nodes.empty() && std::holds_alternative<HyperplaneSplit>(tree.nodes.front().rule);
}

CondensedMatrix to_distances(const PairAccumulator& acc) {
  CondensedMatrix out(acc.sums().size());
  const auto sums = acc.sums().cells();
  auto cells = out.cells();
  const double trees = static_cast<double>(acc.trees());
  for (std::size_t k = 0; k < cells.size(); ++k) cells[k] = standardize_separation(sums[k] / trees);
  return out;
}

}  // namespace

void PairAccumulator::merge(const PairAccumulator& other) {
  if (other.sums_.size() != sums_.size()) throw std::invalid_argument("accumulator sizes differ");
  auto mine = sums_.cells();
  const auto theirs = other.sums_.cells();
  for (std::size_t k = 0; k < mine.size(); ++k) mine[k] += theirs[k];
  trees_ += other.trees_;
}

void traverse_single(const Tree& tree, const EncodedRows& data, std::span<const std::size_t> rows,
                     PairAccumulator& acc) {
  if (tree_is_extended(tree)) throw std::invalid_argument("traverse_single: hyperplane tree");
  traverse(tree, data, rows, acc);
}

void traverse_extended(const Tree& tree, const EncodedRows& data,
                       std::span<const std::size_t> rows, PairAccumulator& acc) {
  if (!tree.nodes.empty() && !tree.nodes.front().is_terminal() && !tree_is_extended(tree)) {
    throw std::invalid_argument("traverse_extended: single-variable tree");
  }
  traverse(tree, data, rows, acc);
}

PairAccumulator accumulate_separation(const Forest& forest, const EncodedRows& data,
                                      std::size_t threads) {
  const std::size_t n_workers =
      std::min(resolve_threads(threads), std::max<std::size_t>(forest.trees.size(), 1));
  std::vector<PairAccumulator> partial(n_workers, PairAccumulator(data.n_rows()));
  const bool extended = forest.params.kind == ModelKind::extended;
  parallel_blocks(forest.trees.size(), n_workers,
                  [&](std::size_t begin, std::size_t end, std::size_t worker) {
                    for (std::size_t k = begin; k < end; ++k) {
                      if (extended) {
                        traverse_extended(forest.trees[k], data, {}, partial[worker]);
                      } else {
                        traverse_single(forest.trees[k], data, {}, partial[worker]);
                      }
                    }
                  });
  for (std::size_t w = 1; w < partial.size(); ++w) partial.front().merge(partial[w]);
  return std::move(partial.front());
}

CondensedMatrix separation_matrix_unique(const Forest& forest, const Dataset& ds,
                                         std::size_t threads) {
  if (ds.n_rows() < 2) throw std::invalid_argument("distances need at least two rows");
  if (forest.trees.empty()) throw std::invalid_argument("forest has no trees");
  const EncodedRows data(ds, forest.schema);
  return to_distances(accumulate_separation(forest, data, threads));
}

CondensedMatrix separation_matrix(const Forest& forest, const Dataset& ds, std::size_t threads) {
  if (ds.n_rows() < 2) throw std::invalid_argument("distances need at least two rows");
  const auto dedup = deduplicate(ds);
  if (!dedup.had_duplicates()) return separation_matrix_unique(forest, ds, threads);

  const std::size_t n = ds.n_rows();
  const auto& groups = dedup.group_map;
  CondensedMatrix unique(dedup.data.n_rows());
  if (dedup.data.n_rows() >= 2) unique = separation_matrix_unique(forest, dedup.data, threads);
  CondensedMatrix out(n);
  auto cells = out.cells();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      cells[CondensedMatrix::index(n, i, j)] =
          groups[i] == groups[j] ? 0.0 : unique(groups[i], groups[j]);
    }
  }
  return out;
}

double pair_distance(const Forest& forest, const Dataset& ds, std::size_t a, std::size_t b) {
  if (a >= ds.n_rows() || b >= ds.n_rows()) throw std::out_of_range("pair_distance: row out of range");
  if (ds.rows_identical(a, b)) return 0.0;
  if (a > b) std::swap(a, b);
  const std::size_t rows[] = {a, b};
  return separation_matrix_unique(forest, ds.select_rows(rows))(0, 1);
}

std::vector<TerminalVisit> route_row(const Tree& tree, const EncodedRows& data, std::size_t row) {
  std::vector<TerminalVisit> out;
  if (tree.nodes.empty()) return out;
  struct Frame {
    std::uint32_t node;
    std::size_t depth;
    double weight;
  };
  std::vector<Frame> stack{{0, 0, 1.0}};
  std::vector<Item> one(1);
  std::vector<Item> left;
  std::vector<Item> right;
  while (!stack.empty()) {
    const Frame frame = stack.back();
    stack.pop_back();
    const TreeNode& node = tree.nodes[frame.node];
    if (node.is_terminal()) {
      out.push_back({frame.node, frame.depth, frame.weight});
      continue;
    }
    one[0] = {row, frame.weight};
    left.clear();
    right.clear();
    split_items(node, data, one, left, right);
    // Right pushed first so the left branch is reported first.
    if (!right.empty()) stack.push_back({node.right, frame.depth + 1, right[0].weight});
    if (!left.empty()) stack.push_back({node.left, frame.depth + 1, left[0].weight});
  }
  return out;
}

std::vector<double> average_isolation_depth(const Forest& forest, const Dataset& ds,
                                            std::size_t threads) {
  if (forest.trees.empty()) throw std::invalid_argument("forest has no trees");
  const EncodedRows data(ds, forest.schema);
  std::vector<double> depth(ds.n_rows(), 0.0);
  parallel_blocks(ds.n_rows(), resolve_threads(threads),
                  [&](std::size_t begin, std::size_t end, std::size_t) {
                    for (std::size_t i = begin; i < end; ++i) {
                      double total = 0.0;
                      for (const auto& tree : forest.trees) {
                        double sum = 0.0;
                        double weight = 0.0;
                        for (const auto& visit : route_row(tree, data, i)) {
                          const std::size_t remaining = tree.nodes[visit.node].n_rows;
                          const double remainder = remaining > 1 ? expected_isolation(remaining) : 0.0;
                          sum += visit.weight * (static_cast<double>(visit.depth) + remainder);
                          weight += visit.weight;
                        }
                        total += sum / weight;
                      }
                      depth[i] = total / static_cast<double>(forest.trees.size());
                    }
                  });
  return depth;
}

std::vector<double> anomaly_scores(const Forest& forest, const Dataset& ds, std::size_t threads) {
  auto scores = average_isolation_depth(forest, ds, threads);
  for (double& s : scores) s = standardize_isolation(s, forest.n_sub);
  return scores;
}

}  // namespace isodist

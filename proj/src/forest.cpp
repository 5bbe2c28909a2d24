#include "isodist/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "isodist/errors.hpp"
#include "isodist/parallel.hpp"

namespace isodist {

const char* to_string(ModelKind kind) noexcept {
  return kind == ModelKind::single ? "single" : "extended";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "single") return ModelKind::single;
  if (name == "extended") return ModelKind::extended;
  throw std::invalid_argument("unknown model kind '" + name + "'");
}

std::size_t log2_depth_limit(std::size_t n_sub) {
  std::size_t depth = 0;
  while ((std::size_t{1} << depth) < n_sub) ++depth;
  return depth;
}

Schema schema_of(const Dataset& ds) {
  Schema schema;
  schema.reserve(ds.n_cols());
  for (const auto& col : ds.columns()) {
    schema.push_back({col.name(), col.kind(), col.labels()});
  }
  return schema;
}

std::vector<std::int32_t> CategoricalSplit::left_subset() const {
  std::vector<std::int32_t> out;
  for (std::size_t c = 0; c < sides.size(); ++c) {
    if (sides[c] == CategorySide::left) out.push_back(static_cast<std::int32_t>(c));
  }
  return out;
}

std::vector<std::int32_t> CategoricalSplit::present() const {
  std::vector<std::int32_t> out;
  for (std::size_t c = 0; c < sides.size(); ++c) {
    if (sides[c] != CategorySide::absent) out.push_back(static_cast<std::int32_t>(c));
  }
  return out;
}

std::size_t Tree::height() const {
  if (nodes.empty()) return 0;
  std::size_t height = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [idx, depth] = stack.back();
    stack.pop_back();
    height = std::max(height, depth);
    const auto& node = nodes[idx];
    if (!node.is_terminal()) {
      stack.emplace_back(node.left, depth + 1);
      stack.emplace_back(node.right, depth + 1);
    }
  }
  return height;
}

std::size_t Tree::n_terminals() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_terminal(); }));
}

EncodedRows::EncodedRows(const Dataset& ds, const Schema& schema) : n_rows_(ds.n_rows()) {
  if (ds.n_cols() != schema.size()) {
    throw SchemaError("data has " + std::to_string(ds.n_cols()) + " columns, model expects " +
                      std::to_string(schema.size()));
  }
  kinds_.reserve(schema.size());
  numeric_.resize(schema.size());
  codes_.resize(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const auto& col = ds.column(j);
    if (col.kind() != schema[j].kind) {
      throw SchemaError("column " + std::to_string(j) + " ('" + col.name() + "') is " +
                        to_string(col.kind()) + ", model expects " + to_string(schema[j].kind));
    }
    kinds_.push_back(col.kind());
    if (col.is_numeric()) {
      numeric_[j].assign(col.values().begin(), col.values().end());
      continue;
    }
    std::unordered_map<std::string, std::int32_t> model_code;
    for (std::size_t c = 0; c < schema[j].labels.size(); ++c) {
      model_code.emplace(schema[j].labels[c], static_cast<std::int32_t>(c));
    }
    std::vector<std::int32_t> remap(col.n_categories(), kUnseenCode);
    for (std::size_t c = 0; c < col.n_categories(); ++c) {
      if (auto it = model_code.find(col.labels()[c]); it != model_code.end()) remap[c] = it->second;
    }
    auto& out = codes_[j];
    out.resize(n_rows_);
    for (std::size_t i = 0; i < n_rows_; ++i) {
      out[i] = col.is_missing(i) ? kMissingCode : remap[static_cast<std::size_t>(col.code(i))];
    }
  }
}

bool EncodedRows::is_missing(std::size_t col, std::size_t row) const noexcept {
  return kinds_[col] == ColumnKind::numeric ? std::isnan(numeric_[col][row])
                                            : codes_[col][row] == kMissingCode;
}

namespace {

constexpr int kMaxSubsetDraws = 16;
constexpr int kMaxThresholdDraws = 64;

bool depth_exhausted(std::optional<std::size_t> max_depth, std::size_t depth) {
  return max_depth && depth >= *max_depth;
}

// Threshold drawn uniformly inside (lo, hi); nullopt when rounding leaves no
// representable value strictly between them.
std::optional<double> draw_threshold(double lo, double hi, Rng& rng) {
  for (int attempt = 0; attempt < kMaxThresholdDraws; ++attempt) {
    const double t = lo + uniform_open(rng) * (hi - lo);
    if (t > lo && t < hi) return t;
  }
  return std::nullopt;
}

// At least two distinct non-missing values among `rows`.
template <typename RowRange>
bool column_splittable(const Column& col, const RowRange& rows) {
  bool seen = false;
  double first_value = 0.0;
  std::int32_t first_code = 0;
  for (const auto& entry : rows) {
    const std::size_t r = entry.row;
    if (col.is_missing(r)) continue;
    if (!seen) {
      seen = true;
      first_value = col.is_numeric() ? col.value(r) : 0.0;
      first_code = col.is_numeric() ? 0 : col.code(r);
      continue;
    }
    if (col.is_numeric() ? col.value(r) != first_value : col.code(r) != first_code) return true;
  }
  return false;
}

template <typename RowRange>
std::vector<std::size_t> eligible_columns(const Dataset& ds, const RowRange& rows) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < ds.n_cols(); ++j) {
    if (column_splittable(ds.column(j), rows)) out.push_back(j);
  }
  return out;
}

struct WeightedRow {
  std::size_t row;
  double weight;
};

class SingleTreeGrower {
 public:
  SingleTreeGrower(const Dataset& ds, std::optional<std::size_t> max_depth, Rng& rng)
      : ds_(ds), max_depth_(max_depth), rng_(rng) {}

  Tree grow(std::vector<WeightedRow> rows) {
    grow_node(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  std::uint32_t grow_node(std::vector<WeightedRow> rows, std::size_t depth) {
    const auto idx = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[idx].n_rows = static_cast<std::uint32_t>(rows.size());
    double total = 0.0;
    for (const auto& r : rows) total += r.weight;
    tree_.nodes[idx].weight = total;

    if (rows.size() <= 1 || depth_exhausted(max_depth_, depth)) return idx;
    const auto eligible = eligible_columns(ds_, rows);
    if (eligible.empty()) return idx;

    std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
    const std::size_t var = eligible[pick(rng_)];
    const Column& col = ds_.column(var);

    // goes_left[i]: 1 left, 0 right, -1 missing (both).
    std::vector<std::int8_t> goes_left(rows.size(), -1);
    SplitRule rule;
    if (col.is_numeric()) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& r : rows) {
        if (col.is_missing(r.row)) continue;
        lo = std::min(lo, col.value(r.row));
        hi = std::max(hi, col.value(r.row));
      }
      const auto threshold = draw_threshold(lo, hi, rng_);
      if (!threshold) return idx;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!col.is_missing(rows[i].row)) goes_left[i] = col.value(rows[i].row) <= *threshold;
      }
      rule = NumericSplit{var, *threshold, 0.0};
    } else {
      std::vector<CategorySide> sides(col.n_categories(), CategorySide::absent);
      std::vector<std::size_t> present;
      for (const auto& r : rows) {
        if (col.is_missing(r.row)) continue;
        const auto c = static_cast<std::size_t>(col.code(r.row));
        if (sides[c] == CategorySide::absent) {
          sides[c] = CategorySide::left;
          present.push_back(c);
        }
      }
      std::sort(present.begin(), present.end());
      bool proper = false;
      for (int attempt = 0; attempt < kMaxSubsetDraws && !proper; ++attempt) {
        std::size_t n_left = 0;
        for (auto c : present) {
          const bool left = (rng_() >> 63) != 0;
          sides[c] = left ? CategorySide::left : CategorySide::right;
          n_left += left;
        }
        proper = n_left > 0 && n_left < present.size();
      }
      if (!proper) return idx;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!col.is_missing(rows[i].row)) {
          goes_left[i] = sides[static_cast<std::size_t>(col.code(rows[i].row))] == CategorySide::left;
        }
      }
      rule = CategoricalSplit{var, std::move(sides), 0.0};
    }

    double w_left = 0.0;
    double w_known = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (goes_left[i] < 0) continue;
      w_known += rows[i].weight;
      if (goes_left[i]) w_left += rows[i].weight;
    }
    const double left_fraction = w_left / w_known;
    std::visit(
        [&](auto& split) {
          if constexpr (requires { split.left_fraction; }) split.left_fraction = left_fraction;
        },
        rule);

    std::vector<WeightedRow> left_rows;
    std::vector<WeightedRow> right_rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (goes_left[i] == 1) {
        left_rows.push_back(r);
      } else if (goes_left[i] == 0) {
        right_rows.push_back(r);
      } else {
        const double wl = r.weight * left_fraction;
        const double wr = r.weight * (1.0 - left_fraction);
        if (wl >= kWeightFloor) left_rows.push_back({r.row, wl});
        if (wr >= kWeightFloor) right_rows.push_back({r.row, wr});
      }
    }
    rows.clear();
    rows.shrink_to_fit();

    tree_.nodes[idx].rule = std::move(rule);
    const auto left = grow_node(std::move(left_rows), depth + 1);
    const auto right = grow_node(std::move(right_rows), depth + 1);
    tree_.nodes[idx].left = left;
    tree_.nodes[idx].right = right;
    return idx;
  }

  const Dataset& ds_;
  std::optional<std::size_t> max_depth_;
  Rng& rng_;
  Tree tree_;
};

struct PlainRow {
  std::size_t row;
};

class ExtendedTreeGrower {
 public:
  ExtendedTreeGrower(const Dataset& ds, std::optional<std::size_t> max_depth, std::size_t n_dims,
                     Rng& rng)
      : ds_(ds), max_depth_(max_depth), n_dims_(n_dims), rng_(rng) {}

  Tree grow(std::vector<PlainRow> rows) {
    grow_node(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  std::uint32_t grow_node(std::vector<PlainRow> rows, std::size_t depth) {
    const auto idx = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[idx].n_rows = static_cast<std::uint32_t>(rows.size());
    tree_.nodes[idx].weight = static_cast<double>(rows.size());

    if (rows.size() <= 1 || depth_exhausted(max_depth_, depth)) return idx;
    auto eligible = eligible_columns(ds_, rows);
    if (eligible.empty()) return idx;

    const std::size_t n_chosen = std::min(n_dims_, eligible.size());
    for (std::size_t k = 0; k < n_chosen; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, eligible.size() - 1);
      std::swap(eligible[k], eligible[pick(rng_)]);
    }
    eligible.resize(n_chosen);
    std::sort(eligible.begin(), eligible.end());

    HyperplaneSplit split;
    std::vector<double> projection(rows.size(), 0.0);
    std::vector<double> scratch;
    scratch.reserve(rows.size());
    std::normal_distribution<double> normal(0.0, 1.0);

    for (const std::size_t var : eligible) {
      const Column& col = ds_.column(var);
      HyperplaneTerm term;
      term.var = var;
      term.kind = col.kind();
      std::vector<std::size_t> known;
      known.reserve(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!col.is_missing(rows[i].row)) known.push_back(i);
      }
      scratch.clear();
      if (col.is_numeric()) {
        double mean = 0.0;
        for (auto i : known) mean += col.value(rows[i].row);
        mean /= static_cast<double>(known.size());
        double ss = 0.0;
        for (auto i : known) {
          const double dev = col.value(rows[i].row) - mean;
          ss += dev * dev;
        }
        const double sigma = std::sqrt(ss / static_cast<double>(known.size()));
        term.coef = normal(rng_) / sigma;
        for (auto i : known) {
          const double contribution = term.coef * col.value(rows[i].row);
          projection[i] += contribution;
          scratch.push_back(contribution);
        }
      } else {
        term.category_coefs.assign(col.n_categories(), std::nullopt);
        std::vector<std::size_t> present;
        for (auto i : known) present.push_back(static_cast<std::size_t>(col.code(rows[i].row)));
        std::sort(present.begin(), present.end());
        present.erase(std::unique(present.begin(), present.end()), present.end());
        for (auto c : present) term.category_coefs[c] = normal(rng_);
        for (auto i : known) {
          const double coef = *term.category_coefs[static_cast<std::size_t>(col.code(rows[i].row))];
          projection[i] += coef;
          scratch.push_back(coef);
        }
      }
      term.impute = median_inplace(scratch);
      if (known.size() != rows.size()) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (col.is_missing(rows[i].row)) projection[i] += term.impute;
        }
      }
      split.terms.push_back(std::move(term));
    }

    const auto [lo, hi] = std::minmax_element(projection.begin(), projection.end());
    if (*lo == *hi) return idx;
    const auto threshold = draw_threshold(*lo, *hi, rng_);
    if (!threshold) return idx;
    split.threshold = *threshold;

    std::vector<PlainRow> left_rows;
    std::vector<PlainRow> right_rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      (projection[i] <= split.threshold ? left_rows : right_rows).push_back(rows[i]);
    }
    rows.clear();
    rows.shrink_to_fit();

    tree_.nodes[idx].rule = std::move(split);
    const auto left = grow_node(std::move(left_rows), depth + 1);
    const auto right = grow_node(std::move(right_rows), depth + 1);
    tree_.nodes[idx].left = left;
    tree_.nodes[idx].right = right;
    return idx;
  }

  const Dataset& ds_;
  std::optional<std::size_t> max_depth_;
  std::size_t n_dims_;
  Rng& rng_;
  Tree tree_;
};

void validate(const Dataset& ds, const ForestParams& params) {
  if (params.n_trees == 0) throw std::invalid_argument("number of trees must be positive");
  if (params.n_dims == 0) throw std::invalid_argument("number of splitting dimensions must be positive");
  if (params.kind == ModelKind::single && params.n_dims != 1) {
    throw std::invalid_argument("single-variable model splits on exactly one dimension");
  }
  if (params.subsample && (*params.subsample < 2 || *params.subsample > ds.n_rows())) {
    throw std::invalid_argument("subsample size must be in [2, number of rows]");
  }
  if (ds.n_rows() < 2) throw FitError("at least two rows are needed to fit a forest");

  struct All {
    std::size_t row;
  };
  std::vector<All> all(ds.n_rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i].row = i;
  if (eligible_columns(ds, all).empty()) {
    throw FitError("no column has at least two distinct non-missing values");
  }
}

}  // namespace

Tree grow_tree_single(const Dataset& ds, std::span<const std::size_t> rows,
                      std::span<const double> weights, std::optional<std::size_t> max_depth,
                      Rng& rng) {
  if (rows.empty()) throw std::invalid_argument("grow_tree_single: empty row set");
  if (rows.size() != weights.size()) throw std::invalid_argument("grow_tree_single: one weight per row");
  std::vector<WeightedRow> start;
  start.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) start.push_back({rows[i], weights[i]});
  return SingleTreeGrower(ds, max_depth, rng).grow(std::move(start));
}

Tree grow_tree_extended(const Dataset& ds, std::span<const std::size_t> rows,
                        std::optional<std::size_t> max_depth, std::size_t n_dims, Rng& rng) {
  if (rows.empty()) throw std::invalid_argument("grow_tree_extended: empty row set");
  if (n_dims == 0) throw std::invalid_argument("grow_tree_extended: n_dims must be positive");
  std::vector<PlainRow> start;
  start.reserve(rows.size());
  for (auto r : rows) start.push_back({r});
  return ExtendedTreeGrower(ds, max_depth, n_dims, rng).grow(std::move(start));
}

std::vector<std::size_t> weighted_subsample(std::span<const double> weights, std::size_t count,
                                            Rng& rng) {
  if (count > weights.size()) throw std::invalid_argument("subsample larger than population");
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  if (count == weights.size()) return order;

  // Key log(u)/w ranks like u^(1/w); larger keys win.
  std::vector<double> keys(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) keys[i] = std::log(uniform_open(rng)) / weights[i];
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return keys[a] > keys[b] || (keys[a] == keys[b] && a < b);
                   });
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

Forest fit_forest(const Dataset& ds, const ForestParams& params, std::size_t threads) {
  validate(ds, params);
  Forest forest;
  forest.params = params;
  forest.schema = schema_of(ds);
  forest.n_sub = params.subsample.value_or(ds.n_rows());
  forest.trees.resize(params.n_trees);

  const auto all_weights = ds.row_weights();
  parallel_blocks(params.n_trees, resolve_threads(threads),
                  [&](std::size_t begin, std::size_t end, std::size_t) {
                    for (std::size_t k = begin; k < end; ++k) {
                      Rng rng = derive_stream(params.seed, k);
                      const auto rows = weighted_subsample(all_weights, forest.n_sub, rng);
                      if (params.kind == ModelKind::single) {
                        std::vector<double> weights;
                        weights.reserve(rows.size());
                        for (auto r : rows) weights.push_back(all_weights[r]);
                        forest.trees[k] = grow_tree_single(ds, rows, weights, params.max_depth, rng);
                      } else {
                        forest.trees[k] =
                            grow_tree_extended(ds, rows, params.max_depth, params.n_dims, rng);
                      }
                    }
                  });
  return forest;
}

}  // namespace isodist

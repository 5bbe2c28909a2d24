#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "isodist/dataset.hpp"
#include "isodist/rng.hpp"

namespace isodist {

enum class ModelKind { single, extended };

const char* to_string(ModelKind kind) noexcept;
ModelKind model_kind_from_string(const std::string& name);

// How a split is chosen among the eligible candidates. Only fully random
// splits are implemented; the enum is the place where gain-guided choosers
// would plug in.
enum class SplitChooser { uniform_random };

struct ForestParams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> subsample;  // rows per tree; nullopt = all rows
  std::size_t n_dims = 1;                // variables per hyperplane (extended)
  std::optional<std::size_t> max_depth;  // nullopt = grow until isolation
  std::uint64_t seed = 0;
  ModelKind kind = ModelKind::single;
  SplitChooser chooser = SplitChooser::uniform_random;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

// ceil(log2(n_sub)), the classic isolation-forest height limit.
std::size_t log2_depth_limit(std::size_t n_sub);

// Rows whose branch weight falls below this are dropped, both when growing
// trees and when passing data through them.
inline constexpr double kWeightFloor = 1e-8;

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::vector<std::string> labels;

  friend bool operator==(const ColumnSchema&, const ColumnSchema&) = default;
};
using Schema = std::vector<ColumnSchema>;

Schema schema_of(const Dataset& ds);

struct Terminal {
  friend bool operator==(const Terminal&, const Terminal&) = default;
};

struct NumericSplit {
  std::size_t var = 0;
  double threshold = 0.0;  // x <= threshold goes left
  double left_fraction = 0.0;

  friend bool operator==(const NumericSplit&, const NumericSplit&) = default;
};

enum class CategorySide : std::uint8_t { absent, left, right };

struct CategoricalSplit {
  std::size_t var = 0;
  // Indexed by category code. `absent` marks categories not present at the
  // node when it was grown; those route like missing values.
  std::vector<CategorySide> sides;
  double left_fraction = 0.0;

  std::vector<std::int32_t> left_subset() const;
  std::vector<std::int32_t> present() const;

  friend bool operator==(const CategoricalSplit&, const CategoricalSplit&) = default;
};

struct HyperplaneTerm {
  std::size_t var = 0;
  ColumnKind kind = ColumnKind::numeric;
  double coef = 0.0;                                  // numeric terms
  std::vector<std::optional<double>> category_coefs;  // categorical terms, by code
  double impute = 0.0;  // contribution of a missing value or unseen category

  friend bool operator==(const HyperplaneTerm&, const HyperplaneTerm&) = default;
};

struct HyperplaneSplit {
  std::vector<HyperplaneTerm> terms;
  double threshold = 0.0;  // projection <= threshold goes left

  friend bool operator==(const HyperplaneSplit&, const HyperplaneSplit&) = default;
};

using SplitRule = std::variant<Terminal, NumericSplit, CategoricalSplit, HyperplaneSplit>;

struct TreeNode {
  SplitRule rule;
  std::uint32_t left = 0;  // child node indices; unused for terminals
  std::uint32_t right = 0;
  std::uint32_t n_rows = 0;  // rows present when the node was grown
  double weight = 0.0;       // their total weight

  bool is_terminal() const noexcept { return std::holds_alternative<Terminal>(rule); }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Nodes in pre-order: the root is nodes[0] and every left subtree precedes
// the matching right subtree.
struct Tree {
  std::vector<TreeNode> nodes;

  std::size_t height() const;
  std::size_t n_terminals() const;

  friend bool operator==(const Tree&, const Tree&) = default;
};

struct Forest {
  ForestParams params;
  Schema schema;
  std::size_t n_sub = 0;  // rows each tree was grown on
  std::vector<Tree> trees;

  friend bool operator==(const Forest&, const Forest&) = default;
};

inline constexpr std::int32_t kUnseenCode = -2;

// A dataset laid out against a model schema: numeric columns as reals (NaN
// when missing), categorical columns as model codes (kMissingCode when
// missing, kUnseenCode for labels the model never saw). Columns are matched
// by position and must agree in kind.
class EncodedRows {
 public:
  EncodedRows(const Dataset& ds, const Schema& schema);

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_cols() const noexcept { return numeric_.size(); }

  double value(std::size_t col, std::size_t row) const noexcept { return numeric_[col][row]; }
  std::int32_t code(std::size_t col, std::size_t row) const noexcept { return codes_[col][row]; }
  bool is_missing(std::size_t col, std::size_t row) const noexcept;

 private:
  std::size_t n_rows_ = 0;
  std::vector<ColumnKind> kinds_;
  std::vector<std::vector<double>> numeric_;
  std::vector<std::vector<std::int32_t>> codes_;
};

// Grows one single-variable tree on `rows` of `ds` with starting weights
// `weights` (one per entry of `rows`).
Tree grow_tree_single(const Dataset& ds, std::span<const std::size_t> rows,
                      std::span<const double> weights, std::optional<std::size_t> max_depth,
                      Rng& rng);

// Grows one hyperplane tree combining up to `n_dims` variables per split.
Tree grow_tree_extended(const Dataset& ds, std::span<const std::size_t> rows,
                        std::optional<std::size_t> max_depth, std::size_t n_dims, Rng& rng);

// Draws `count` distinct rows with probability proportional to row weight
// (Efraimidis-Spirakis keys). Returned in ascending order.
std::vector<std::size_t> weighted_subsample(std::span<const double> weights, std::size_t count,
                                            Rng& rng);

// Tree k is grown from derive_stream(seed, k), so the result does not depend
// on `threads`.
Forest fit_forest(const Dataset& ds, const ForestParams& params, std::size_t threads = 1);

}  // namespace isodist

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "isodist/condensed_matrix.hpp"
#include "isodist/dataset.hpp"
#include "isodist/forest.hpp"

namespace isodist {

// Running sums of pairwise separation depths over the trees seen so far.
class PairAccumulator {
 public:
  explicit PairAccumulator(std::size_t n_rows) : sums_(n_rows) {}

  const CondensedMatrix& sums() const noexcept { return sums_; }
  CondensedMatrix& sums() noexcept { return sums_; }
  std::size_t trees() const noexcept { return trees_; }
  void count_tree() noexcept { ++trees_; }

  // Cellwise addition.
  void merge(const PairAccumulator& other);

 private:
  CondensedMatrix sums_;
  std::size_t trees_ = 0;
};

// Pass `rows` (ascending indices into `data`, all of them when empty) down
// one tree, adding its separation depths into `acc`: every pair sharing a
// split node gets w_i * w_j, every pair sharing a terminal gets 3 w_i w_j.
// Single-variable trees send missing values and unseen categories down both
// branches scaled by the node's left fraction; hyperplane trees substitute
// the stored imputation values instead.
void traverse_single(const Tree& tree, const EncodedRows& data, std::span<const std::size_t> rows,
                     PairAccumulator& acc);
void traverse_extended(const Tree& tree, const EncodedRows& data,
                       std::span<const std::size_t> rows, PairAccumulator& acc);

// Sums over every tree of the forest. Workers own private accumulators that
// are merged in worker order; with threads == 1 the result is bit-exact and
// reproducible.
PairAccumulator accumulate_separation(const Forest& forest, const EncodedRows& data,
                                      std::size_t threads = 1);

// Standardized distances 2^(-(avg depth - 1) / 2) for rows that are already
// distinct.
CondensedMatrix separation_matrix_unique(const Forest& forest, const Dataset& ds,
                                         std::size_t threads = 1);

// Distances for arbitrary rows: exact duplicates are collapsed before the
// trees are traversed and expanded afterwards at distance 0.
CondensedMatrix separation_matrix(const Forest& forest, const Dataset& ds, std::size_t threads = 1);

// Distance between rows `a` and `b` of `ds`, computed on those two rows alone.
double pair_distance(const Forest& forest, const Dataset& ds, std::size_t a, std::size_t b);

struct TerminalVisit {
  std::uint32_t node = 0;
  std::size_t depth = 0;
  double weight = 0.0;
};

// Terminal nodes reached by one row, with the share of its weight reaching
// each. Fully observed rows reach exactly one terminal with weight 1.
std::vector<TerminalVisit> route_row(const Tree& tree, const EncodedRows& data, std::size_t row);

// Per row: weighted mean over trees of (terminal depth + expected_isolation of
// the terminal's fit-time row count).
std::vector<double> average_isolation_depth(const Forest& forest, const Dataset& ds,
                                            std::size_t threads = 1);

// standardize_isolation(average_isolation_depth, n_sub); in (0, 1], larger
// is more anomalous.
std::vector<double> anomaly_scores(const Forest& forest, const Dataset& ds, std::size_t threads = 1);

}  // namespace isodist

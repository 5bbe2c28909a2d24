#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "isodist/depth_math.hpp"
#include "isodist/distance.hpp"
#include "isodist/errors.hpp"
#include "isodist/matrix_io.hpp"
#include "isodist/scenarios.hpp"

using namespace isodist;

namespace {

Forest fit(const Dataset& ds, ModelKind kind, std::size_t trees, std::uint64_t seed, std::size_t n_dims = 2) {
  ForestParams p;
  p.kind = kind;
  p.n_dims = kind == ModelKind::single ? 1 : n_dims;
  p.n_trees = trees;
  p.seed = seed;
  return fit_forest(ds, p);
}

Dataset mixed_full(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return generate_scenario(ScenarioConfig{ScenarioName::mixed, n, seed, 0.0}, rng).full;
}

Dataset mixed_missing(std::size_t n, std::uint64_t seed, double fraction) {
  Rng rng(seed);
  return *generate_scenario(ScenarioConfig{ScenarioName::mixed, n, seed, fraction}, rng).with_missing;
}

TreeNode terminal(std::uint32_t rows) {
  TreeNode n;
  n.n_rows = rows;
  n.weight = rows;
  return n;
}

TreeNode split(SplitRule rule, std::uint32_t left, std::uint32_t right, std::uint32_t rows) {
  TreeNode n;
  n.rule = std::move(rule);
  n.left = left;
  n.right = right;
  n.n_rows = rows;
  n.weight = rows;
  return n;
}

Forest hand_forest(const Dataset& ds, Tree tree, ModelKind kind = ModelKind::single) {
  Forest f;
  f.params.n_trees = 1;
  f.params.kind = kind;
  f.schema = schema_of(ds);
  f.n_sub = ds.n_rows();
  f.trees.push_back(std::move(tree));
  return f;
}

void check_against_paths(const Dataset& ds, const Forest& forest) {
  const EncodedRows enc(ds, forest.schema);
  for (const auto& tree : forest.trees) {
    PairAccumulator acc(ds.n_rows());
    if (forest.params.kind == ModelKind::single) {
      traverse_single(tree, enc, {}, acc);
    } else {
      traverse_extended(tree, enc, {}, acc);
    }
    std::vector<std::vector<std::uint32_t>> paths;
    for (std::size_t i = 0; i < ds.n_rows(); ++i) paths.push_back(oracle::row_path(tree, ds, i));
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
      for (std::size_t j = i + 1; j < ds.n_rows(); ++j) {
        ASSERT_EQ(acc.sums()(i, j), oracle::path_separation(paths[i], paths[j])) << i << "," << j;
      }
    }
  }
}

}  // namespace

TEST(CondensedMatrix, Indexing) {
  CondensedMatrix m(5);
  EXPECT_EQ(m.n_cells(), 10u);
  double v = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = i + 1; j < 5; ++j) {
      EXPECT_EQ(CondensedMatrix::index(5, i, j), static_cast<std::size_t>(v));
      EXPECT_EQ(CondensedMatrix::row_offset(5, i) + j, CondensedMatrix::index(5, i, j));
      m.at(i, j) = ++v;
    }
  }
  EXPECT_EQ(m(3, 1), m(1, 3));
  EXPECT_EQ(m(2, 2), 0.0);
  EXPECT_THROW(m.at(2, 2), std::out_of_range);
  EXPECT_THROW(CondensedMatrix(4, std::vector<double>(5)), std::invalid_argument);
}

TEST(Traversal, RootSeparationGivesDistanceOne) {
  const Dataset ds({Column::numeric("x", {0.0, 1.0})});
  Tree t;
  t.nodes = {split(NumericSplit{0, 0.5, 0.5}, 1, 2, 2), terminal(1), terminal(1)};
  EXPECT_EQ(separation_matrix(hand_forest(ds, t), ds)(0, 1), 1.0);
}

TEST(Traversal, SharedTerminalBelowRoot) {
  const Dataset ds({Column::numeric("x", {0.0, 0.1, 1.0})});
  Tree t;
  t.nodes = {split(NumericSplit{0, 0.5, 2.0 / 3.0}, 1, 2, 3), terminal(2), terminal(1)};
  const auto m = separation_matrix(hand_forest(ds, t), ds);
  EXPECT_DOUBLE_EQ(m(0, 1), std::pow(2.0, -1.5));
  EXPECT_EQ(m(0, 2), 1.0);
}

TEST(Traversal, UnseenCategorySplitsWeight) {
  const Dataset train({Column::categorical("c", {0, 1}, {"a", "b"})});
  CategoricalSplit rule{0, {CategorySide::left, CategorySide::right}, 0.25};
  Tree t;
  t.nodes = {split(rule, 1, 2, 4), terminal(1), terminal(3)};
  const Forest f = hand_forest(train, t);

  // Row 0 holds "a", row 1 a label the model never saw.
  const Dataset query({Column::categorical("c", {0, 2}, {"a", "b", "zz"})});
  const EncodedRows enc(query, f.schema);
  PairAccumulator acc(2);
  traverse_single(f.trees[0], enc, {}, acc);
  // Root: +1. The unseen row sends 0.25 of its weight left, where it meets
  // the "a" row in a terminal: +3 * 0.25.
  EXPECT_DOUBLE_EQ(acc.sums()(0, 1), 1.0 + 0.75);

  const auto visits = route_row(f.trees[0], enc, 1);
  ASSERT_EQ(visits.size(), 2u);
  EXPECT_DOUBLE_EQ(visits[0].weight + visits[1].weight, 1.0);
  EXPECT_EQ(route_row(f.trees[0], enc, 0).size(), 1u);
}

TEST(Traversal, HyperplaneImputesMissing) {
  const Dataset train({Column::numeric("x", {0.0, 2.0}), Column::numeric("y", {0.0, 2.0})});
  HyperplaneTerm tx{0, ColumnKind::numeric, 1.0, {}, 5.0};
  HyperplaneTerm ty{1, ColumnKind::numeric, 1.0, {}, -5.0};
  Tree t;
  t.nodes = {split(HyperplaneSplit{{tx, ty}, 1.0}, 1, 2, 2), terminal(1), terminal(1)};
  const Forest f = hand_forest(train, t, ModelKind::extended);
  // Both cells missing: y = 5 - 5 = 0 -> left. One cell missing: 5 + 2 -> right.
  const Dataset q({Column::numeric("x", {std::nan(""), std::nan(""), 0.1}),
                   Column::numeric("y", {std::nan(""), 2.0, 0.2})});
  const EncodedRows enc(q, f.schema);
  EXPECT_EQ(route_row(f.trees[0], enc, 0).at(0).node, 1u);
  EXPECT_EQ(route_row(f.trees[0], enc, 1).at(0).node, 2u);
  EXPECT_EQ(route_row(f.trees[0], enc, 2).at(0).node, 1u);
  const auto m = separation_matrix(f, q);
  EXPECT_DOUBLE_EQ(m(0, 2), std::pow(2.0, -1.5));
  EXPECT_EQ(m(0, 1), 1.0);
}

TEST(Traversal, MatchesPathOracleSingle) {
  check_against_paths(mixed_full(80, 1), fit(mixed_full(80, 1), ModelKind::single, 10, 3));
  const auto num = oracle::normal_cloud(80, 2, 3);
  check_against_paths(num, fit(num, ModelKind::single, 10, 4));
}

TEST(Traversal, MatchesPathOracleExtended) {
  const auto mixed = mixed_full(80, 5);
  check_against_paths(mixed, fit(mixed, ModelKind::extended, 10, 6, 3));
  const auto num = oracle::normal_cloud(80, 7, 3);
  check_against_paths(num, fit(num, ModelKind::extended, 10, 8));
}

TEST(Traversal, RowsMustBeAscending) {
  const auto ds = oracle::normal_cloud(10, 1);
  const Forest f = fit(ds, ModelKind::single, 1, 1);
  const EncodedRows enc(ds, f.schema);
  PairAccumulator acc(10);
  const std::vector<std::size_t> rows{3, 1};
  EXPECT_THROW(traverse_single(f.trees[0], enc, rows, acc), std::invalid_argument);
  EXPECT_THROW(traverse_extended(f.trees[0], enc, {}, acc), std::invalid_argument);
}

TEST(Traversal, PerTreeUltrametricAndTriangle) {
  const auto ds = oracle::normal_cloud(60, 9);
  const Forest f = fit(ds, ModelKind::single, 5, 10);
  const EncodedRows enc(ds, f.schema);
  for (const auto& tree : f.trees) {
    PairAccumulator acc(60);
    traverse_single(tree, enc, {}, acc);
    const auto& s = acc.sums();
    for (std::size_t a = 0; a < 60; ++a) {
      for (std::size_t b = a + 1; b < 60; ++b) {
        for (std::size_t c = b + 1; c < 60; ++c) {
          double d[3] = {s(a, b), s(a, c), s(b, c)};
          std::sort(d, d + 3);
          ASSERT_EQ(d[0], d[1]);
          // The triangle holds on the standardized per-tree distance. On raw
          // depths it does not: a far-away b gives s(a,b) = s(b,c) = 1 while
          // s(a,c) can be anything.
          ASSERT_LE(standardize_separation(s(a, c)),
                    standardize_separation(s(a, b)) + standardize_separation(s(b, c)));
        }
      }
    }
  }
}

TEST(Traversal, IntegerSumsWithoutMissing) {
  const auto ds = mixed_full(100, 12);
  const Forest f = fit(ds, ModelKind::single, 20, 13);
  const auto acc = accumulate_separation(f, EncodedRows(ds, f.schema));
  EXPECT_EQ(acc.trees(), 20u);
  for (double v : acc.sums().cells()) {
    ASSERT_NEAR(v, std::round(v), 1e-9);
    ASSERT_GE(v, 20.0);
  }
}

TEST(Traversal, MissingWeightConservation) {
  const auto ds = mixed_missing(120, 3, 0.3);
  const Forest f = fit(ds, ModelKind::single, 10, 4);
  const EncodedRows enc(ds, f.schema);
  for (const auto& tree : f.trees) {
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
      double total = 0.0;
      for (const auto& v : route_row(tree, enc, i)) total += v.weight;
      // Copies under the weight floor are dropped; with this little missingness
      // none should be.
      ASSERT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(SeparationMatrix, RangeAndDiagonal) {
  const auto ds = mixed_missing(150, 2, 0.1);
  for (auto kind : {ModelKind::single, ModelKind::extended}) {
    const auto m = separation_matrix(fit(ds, kind, 30, 1), ds);
    for (std::size_t i = 0; i < 150; ++i) {
      EXPECT_EQ(m(i, i), 0.0);
      for (std::size_t j = i + 1; j < 150; ++j) {
        ASSERT_GT(m(i, j), 0.0);
        ASSERT_LE(m(i, j), 1.0);
        ASSERT_EQ(m(i, j), m(j, i));
      }
    }
  }
}

// "About 0.5" rests on split positions being uniform over the sorted points,
// which uniform thresholds give only on uniformly spread data. Normal tails
// get chopped off early and push the average down to about 0.38.
TEST(SeparationMatrix, AverageNearHalfForRandomPairs) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u;
  std::vector<double> x(400), y(400);
  for (std::size_t i = 0; i < 400; ++i) x[i] = u(rng), y[i] = u(rng);
  const Dataset ds({Column::numeric("x", x), Column::numeric("y", y)});
  const auto m = separation_matrix(fit(ds, ModelKind::single, 50, 2), ds);
  double sum = 0.0;
  for (double v : m.cells()) sum += v;
  EXPECT_NEAR(sum / static_cast<double>(m.n_cells()), 0.5, 0.08);
}

TEST(SeparationMatrix, DuplicatesExpandAtZero) {
  const Dataset ds({Column::numeric("x", {1.0, 2.0, 1.0, 3.0})});
  const Forest f = fit(ds, ModelKind::single, 10, 1);
  const auto m = separation_matrix(f, ds);
  EXPECT_EQ(m(0, 2), 0.0);
  EXPECT_EQ(m(0, 1), m(2, 1));
  EXPECT_GT(m(0, 1), 0.0);
  EXPECT_THROW(separation_matrix(f, Dataset({Column::numeric("x", {1.0})})), std::invalid_argument);
}

TEST(SeparationMatrix, SchemaMismatch) {
  const auto ds = oracle::normal_cloud(20, 1);
  const Forest f = fit(ds, ModelKind::single, 2, 1);
  EXPECT_THROW(separation_matrix(f, oracle::normal_cloud(20, 1, 3)), SchemaError);
}

TEST(SeparationMatrix, ThreadsAgree) {
  const auto ds = mixed_missing(200, 8, 0.1);
  for (auto kind : {ModelKind::single, ModelKind::extended}) {
    const Forest f = fit(ds, kind, 25, 3);
    const auto one = separation_matrix(f, ds, 1);
    EXPECT_EQ(one, separation_matrix(f, ds, 1));
    const auto many = separation_matrix(f, ds, 4);
    for (std::size_t k = 0; k < one.n_cells(); ++k) ASSERT_NEAR(one.cells()[k], many.cells()[k], 1e-12);
  }
}

TEST(PairDistance, ThirdPointIndependence) {
  const auto ds = mixed_missing(120, 4, 0.1);
  for (auto kind : {ModelKind::single, ModelKind::extended}) {
    const Forest f = fit(ds, kind, 20, 5);
    const auto m = separation_matrix(f, ds);
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<std::size_t> pick(0, 119);
    for (int k = 0; k < 40; ++k) {
      const std::size_t a = pick(rng), b = pick(rng);
      if (a == b) continue;
      ASSERT_EQ(pair_distance(f, ds, a, b), m(a, b));
    }
  }
}

TEST(PairDistance, SelfIsZero) {
  const auto ds = oracle::normal_cloud(10, 1);
  const Forest f = fit(ds, ModelKind::single, 3, 1);
  EXPECT_EQ(pair_distance(f, ds, 4, 4), 0.0);
  EXPECT_THROW(pair_distance(f, ds, 0, 10), std::out_of_range);
}

TEST(SeparationMatrix, ScaleEquivariance) {
  const auto ds = oracle::normal_cloud(200, 31);
  std::vector<Column> cols;
  for (std::size_t j = 0; j < ds.n_cols(); ++j) {
    std::vector<double> v(ds.column(j).values().begin(), ds.column(j).values().end());
    for (auto& x : v) x = 100.0 * x + 7.0;
    cols.push_back(Column::numeric(ds.column(j).name(), std::move(v)));
  }
  const Dataset scaled(std::move(cols));
  EXPECT_EQ(separation_matrix(fit(ds, ModelKind::single, 20, 2), ds),
            separation_matrix(fit(scaled, ModelKind::single, 20, 2), scaled));
}

TEST(AnomalyScores, RangeAndOutlier) {
  auto base = oracle::normal_cloud(255, 41);
  std::vector<Column> cols;
  for (std::size_t j = 0; j < 2; ++j) {
    std::vector<double> v(base.column(j).values().begin(), base.column(j).values().end());
    v.push_back(10.0);
    cols.push_back(Column::numeric(base.column(j).name(), std::move(v)));
  }
  const Dataset ds(std::move(cols));
  ForestParams p;
  p.n_trees = 100;
  p.subsample = 128;
  p.max_depth = log2_depth_limit(128);
  p.seed = 1;
  const Forest f = fit_forest(ds, p);
  const auto scores = anomaly_scores(f, ds);
  ASSERT_EQ(scores.size(), 256u);
  for (double s : scores) {
    EXPECT_GT(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
  EXPECT_EQ(std::max_element(scores.begin(), scores.end()) - scores.begin(), 255);
}

TEST(AnomalyScores, DeepClusterBelowHalf) {
  // Half the rows sit on one point; isolating any of them takes the whole
  // tree plus the remainder term, well past the expectation.
  std::vector<double> x(200);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < 200; ++i) x[i] = i < 100 ? 0.0 : normal(rng);
  const Dataset ds({Column::numeric("x", x)});
  ForestParams p;
  p.n_trees = 50;
  const Forest f = fit_forest(ds, p);
  const auto depth = average_isolation_depth(f, ds);
  const auto scores = anomaly_scores(f, ds);
  EXPECT_LT(scores[0], 0.5);
  EXPECT_DOUBLE_EQ(scores[0], standardize_isolation(depth[0], f.n_sub));
}

TEST(MatrixIo, BinaryAndCsvRoundTrip) {
  const auto ds = oracle::normal_cloud(30, 3);
  auto m = separation_matrix(fit(ds, ModelKind::single, 5, 1), ds);
  m.at(0, 1) = std::nan("");
  std::stringstream bin;
  write_matrix_binary(m, bin);
  EXPECT_EQ(bin.str().substr(0, 8), "ISODIST1");
  EXPECT_EQ(bin.str().size(), 8u + 8u + 8u * m.n_cells());
  const auto back = read_matrix_binary(bin);
  std::stringstream csv;
  write_matrix_csv(m, csv);
  const auto back_csv = read_matrix_csv(csv);
  ASSERT_EQ(back.size(), 30u);
  for (std::size_t k = 0; k < m.n_cells(); ++k) {
    if (std::isnan(m.cells()[k])) {
      EXPECT_TRUE(std::isnan(back.cells()[k]));
      EXPECT_TRUE(std::isnan(back_csv.cells()[k]));
    } else {
      EXPECT_EQ(back.cells()[k], m.cells()[k]);
      EXPECT_NEAR(back_csv.cells()[k], m.cells()[k], 1e-15);
    }
  }
}

TEST(MatrixIo, Errors) {
  std::stringstream bad("NOTMAGIC........");
  EXPECT_THROW(read_matrix_binary(bad), std::runtime_error);
  CondensedMatrix m(4, 0.5);
  std::stringstream bin;
  write_matrix_binary(m, bin);
  std::stringstream truncated(bin.str().substr(0, bin.str().size() - 3));
  EXPECT_THROW(read_matrix_binary(truncated), std::runtime_error);
  std::stringstream empty;
  EXPECT_THROW(read_matrix_csv(empty), std::runtime_error);
}

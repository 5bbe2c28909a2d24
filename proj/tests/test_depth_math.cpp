#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "helpers.hpp"
#include "isodist/depth_math.hpp"

using namespace isodist;

TEST(DepthMath, BaseCases) {
  for (auto fn : {expected_separation_direct, expected_separation_incremental}) {
    EXPECT_EQ(fn(1), 0.0);
    EXPECT_EQ(fn(2), 1.0);
  }
}

// By hand: E3 = 1 + (1/3 + 1/3) / 2 = 4/3.
// E4: the i = 1, 2, 3 terms are 1/2 * 4/3, 1/6 + 1/6 and 1/2 * 4/3, summing
// to 5/3, so E4 = 1 + 5/9 = 14/9.
TEST(DepthMath, HandEvaluatedValues) {
  EXPECT_NEAR(expected_separation_direct(3), 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(expected_separation_incremental(3), 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(expected_separation_direct(4), 14.0 / 9.0, 1e-12);
  EXPECT_NEAR(expected_separation_incremental(4), 14.0 / 9.0, 1e-12);
}

TEST(DepthMath, DirectMatchesCombinatorialOracle) {
  const auto table = oracle::combinatorial_table(128);
  for (std::size_t n = 1; n <= 128; ++n) {
    EXPECT_NEAR(expected_separation_direct(n), table[n], 1e-12) << "n=" << n;
  }
}

TEST(DepthMath, RecursionsAgreeUpTo256) {
  for (std::size_t n = 1; n <= 256; ++n) {
    EXPECT_NEAR(expected_separation_direct(n), expected_separation_incremental(n), 1e-9) << "n=" << n;
  }
}

TEST(DepthMath, TableIncreasingAndBelowLimit) {
  DepthTable table;
  table.reserve(5000);
  const auto& v = table.values();
  for (std::size_t n = 2; n + 1 < v.size(); ++n) {
    ASSERT_GT(v[n + 1], v[n]) << n;
    ASSERT_LT(v[n + 1], kSeparationDepthLimit);
  }
  EXPECT_GT(v[5000], 2.99);
}

TEST(DepthMath, TablesLazilyExtend) {
  DepthTable direct(DepthTable::Method::direct);
  EXPECT_NEAR(direct.at(10), expected_separation_incremental(10), 1e-12);
  EXPECT_GE(direct.values().size(), 11u);
  EXPECT_NEAR(direct.at(3), 4.0 / 3.0, 1e-12);
}

TEST(DepthMath, ZeroIsRejected) {
  EXPECT_THROW(expected_separation_direct(0), std::invalid_argument);
  EXPECT_THROW(expected_separation_incremental(0), std::invalid_argument);
  EXPECT_THROW(expected_isolation(0), std::invalid_argument);
  DepthTable t;
  EXPECT_THROW(t.at(0), std::invalid_argument);
  HarmonicCache h;
  EXPECT_THROW(h.at(0), std::invalid_argument);
}

TEST(DepthMath, Harmonic) {
  HarmonicCache h;
  EXPECT_EQ(h.at(1), 1.0);
  EXPECT_DOUBLE_EQ(h.at(2), 1.5);
  double sum = 0.0;
  for (int k = 1; k <= 10; ++k) sum += 1.0 / k;
  EXPECT_NEAR(h.at(10), sum, 1e-14);
}

TEST(DepthMath, ExpectedIsolation) {
  EXPECT_EQ(expected_isolation(1), 0.0);
  EXPECT_DOUBLE_EQ(expected_isolation(2), 1.0);
  EXPECT_NEAR(expected_isolation(10), 3.85794, 1e-5);
}

TEST(DepthMath, StandardizeSeparation) {
  EXPECT_EQ(standardize_separation(1.0), 1.0);
  EXPECT_EQ(standardize_separation(3.0), 0.5);
  EXPECT_EQ(standardize_separation(5.0), 0.25);
  EXPECT_THROW(standardize_separation(0.999), std::invalid_argument);
  double prev = 1.0;
  for (double s = 1.25; s < 60.0; s += 0.25) {
    const double f = standardize_separation(s);
    ASSERT_LT(f, prev);
    ASSERT_GT(f, 0.0);
    prev = f;
  }
}

TEST(DepthMath, StandardizeIsolation) {
  EXPECT_DOUBLE_EQ(standardize_isolation(expected_isolation(64), 64), 0.5);
  EXPECT_EQ(standardize_isolation(0.0, 10), 1.0);
  EXPECT_LT(standardize_isolation(1e4, 10), 1e-100);
  EXPECT_THROW(standardize_isolation(1.0, 1), std::invalid_argument);
  EXPECT_THROW(standardize_isolation(-1.0, 10), std::invalid_argument);
}

TEST(DepthMath, MonteCarloSmall) {
  for (std::size_t n : {3u, 6u}) {
    const auto mc = oracle::simulate_separation(n, 40000, 11 + n);
    EXPECT_LE(std::abs(mc.mean - expected_separation_direct(n)), 4.0 * mc.std_error) << "n=" << n;
  }
}

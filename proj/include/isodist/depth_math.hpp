#pragma once

#include <cstddef>
#include <vector>

namespace isodist {

// Expected separation depth E[s_n] of two random points among n when every
// node sends a Uniform{1..m-1} sized random subset of its m points left.
//
// Values are memoized and extended on demand. `values()[n]` holds E[s_n];
// index 0 is unused and set to 0.
//
// Not thread-safe while growing; use the free functions below for shared
// access.
class DepthTable {
 public:
  enum class Method { direct, incremental };

  explicit DepthTable(Method method = Method::incremental);

  // E[s_n]; throws std::invalid_argument for n == 0.
  double at(std::size_t n);

  // Makes sure entries up to and including `n` exist.
  void reserve(std::size_t n);

  const std::vector<double>& values() const noexcept { return values_; }
  Method method() const noexcept { return method_; }

 private:
  void extend_direct(std::size_t n);
  void extend_incremental(std::size_t n);

  Method method_;
  std::vector<double> values_;
};

// H_n = sum_{k=1..n} 1/k, memoized.
class HarmonicCache {
 public:
  HarmonicCache();

  // H_n; throws std::invalid_argument for n == 0.
  double at(std::size_t n);

  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

// E[s_n] from the full combinatorial sum over all split sizes. O(n^2) to fill.
double expected_separation_direct(std::size_t n);

// E[s_n] from the first-order recursion
//   E[s_n] = E[s_{n-1}] + (3n - 4 - n E[s_{n-1}]) / (n (n - 1)).
double expected_separation_incremental(std::size_t n);

// E[s_inf]: the limit both recursions approach from below.
inline constexpr double kSeparationDepthLimit = 3.0;

// Expected isolation depth of a random point among n: 2 (H_n - 1).
double expected_isolation(std::size_t n);

// 2^(-(s - 1) / 2). Maps an average separation depth in [1, inf) onto (0, 1],
// with 0.5 at the infinite-sample expectation s = 3.
double standardize_separation(double avg_depth);

// 2^(-depth / expected_isolation(n)). Larger is more anomalous.
double standardize_isolation(double avg_depth, std::size_t n);

}  // namespace isodist

#include "isodist/depth_math.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace isodist {
namespace {

void require_positive(std::size_t n, const char* what) {
  if (n == 0) {
    throw std::invalid_argument(std::string(what) + ": n must be >= 1");
  }
}

template <typename Table>
double locked_lookup(Table& table, std::mutex& mutex, std::size_t n) {
  std::lock_guard lock(mutex);
  return table.at(n);
}

}  // namespace

DepthTable::DepthTable(Method method) : method_(method), values_{0.0, 0.0, 1.0} {}

double DepthTable::at(std::size_t n) {
  require_positive(n, "expected separation depth");
  reserve(n);
  return values_[n];
}

void DepthTable::reserve(std::size_t n) {
  if (n < values_.size()) return;
  if (method_ == Method::direct) {
    extend_direct(n);
  } else {
    extend_incremental(n);
  }
}

void DepthTable::extend_direct(std::size_t n) {
  values_.reserve(n + 1);
  for (std::size_t size = values_.size(); size <= n; ++size) {
    // Probability that a fixed pair stays together on a branch holding i of
    // the `size` points is C(i,2)/C(size,2) = i(i-1) / (size(size-1)).
    const double sz = static_cast<double>(size);
    const double pairs = sz * (sz - 1.0);
    double sum = 0.0;
    for (std::size_t i = 1; i < size; ++i) {
      const double left = static_cast<double>(i);
      const double right = sz - left;
      sum += (left * (left - 1.0) / pairs) * values_[i] +
             (right * (right - 1.0) / pairs) * values_[size - i];
    }
    values_.push_back(1.0 + sum / (sz - 1.0));
  }
}

void DepthTable::extend_incremental(std::size_t n) {
  values_.reserve(n + 1);
  for (std::size_t size = values_.size(); size <= n; ++size) {
    const double sz = static_cast<double>(size);
    const double prev = values_[size - 1];
    values_.push_back(prev + (3.0 * sz - 4.0 - sz * prev) / (sz * (sz - 1.0)));
  }
}

HarmonicCache::HarmonicCache() : values_{0.0, 1.0} {}

double HarmonicCache::at(std::size_t n) {
  require_positive(n, "harmonic number");
  values_.reserve(n + 1);
  for (std::size_t k = values_.size(); k <= n; ++k) {
    values_.push_back(values_.back() + 1.0 / static_cast<double>(k));
  }
  return values_[n];
}

double expected_separation_direct(std::size_t n) {
  static DepthTable table(DepthTable::Method::direct);
  static std::mutex mutex;
  return locked_lookup(table, mutex, n);
}

double expected_separation_incremental(std::size_t n) {
  static DepthTable table(DepthTable::Method::incremental);
  static std::mutex mutex;
  return locked_lookup(table, mutex, n);
}

double expected_isolation(std::size_t n) {
  static HarmonicCache cache;
  static std::mutex mutex;
  return 2.0 * (locked_lookup(cache, mutex, n) - 1.0);
}

double standardize_separation(double avg_depth) {
  if (!(avg_depth >= 1.0)) {
    throw std::invalid_argument("standardize_separation: average depth must be >= 1");
  }
  return std::exp2(-(avg_depth - 1.0) / 2.0);
}

double standardize_isolation(double avg_depth, std::size_t n) {
  if (n < 2) {
    throw std::invalid_argument("standardize_isolation: n must be >= 2");
  }
  if (!(avg_depth >= 0.0)) {
    throw std::invalid_argument("standardize_isolation: depth must be >= 0");
  }
  return std::exp2(-avg_depth / expected_isolation(n));
}

}  // namespace isodist

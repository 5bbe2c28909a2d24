#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace isodist {

// Symmetric, zero-diagonal n x n matrix stored as its strict upper triangle in
// row-major order: (0,1), (0,2), ..., (0,n-1), (1,2), ...
class CondensedMatrix {
 public:
  CondensedMatrix() = default;
  explicit CondensedMatrix(std::size_t n, double fill = 0.0)
      : n_(n), cells_(n < 2 ? 0 : n * (n - 1) / 2, fill) {}

  CondensedMatrix(std::size_t n, std::vector<double> cells) : n_(n), cells_(std::move(cells)) {
    if (cells_.size() != (n < 2 ? 0 : n * (n - 1) / 2)) {
      throw std::invalid_argument("CondensedMatrix: cell count does not match n");
    }
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t n_cells() const noexcept { return cells_.size(); }

  // Position of (i, j), i < j, in the cell array.
  static std::size_t index(std::size_t n, std::size_t i, std::size_t j) noexcept {
    assert(i < j && j < n);
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }

  // Offset such that index(n, i, j) == row_offset(n, i) + j for every j > i.
  static std::size_t row_offset(std::size_t n, std::size_t i) noexcept {
    return i * n - i * (i + 1) / 2 - i - 1;
  }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    if (i == j) return 0.0;
    return i < j ? cells_[index(n_, i, j)] : cells_[index(n_, j, i)];
  }

  double& at(std::size_t i, std::size_t j) {
    if (i == j || i >= n_ || j >= n_) {
      throw std::out_of_range("CondensedMatrix::at: invalid cell");
    }
    return i < j ? cells_[index(n_, i, j)] : cells_[index(n_, j, i)];
  }

  std::span<double> cells() noexcept { return cells_; }
  std::span<const double> cells() const noexcept { return cells_; }

  friend bool operator==(const CondensedMatrix&, const CondensedMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> cells_;
};

}  // namespace isodist

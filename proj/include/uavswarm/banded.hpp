#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace uavswarm {

/// Square matrix with two sub- and two super-diagonals, stored by row as
/// (i,i-2), (i,i-1), (i,i), (i,i+1), (i,i+2).
class PentadiagonalMatrix {
 public:
  explicit PentadiagonalMatrix(std::size_t n = 0) : band_(n) {}

  [[nodiscard]] std::size_t size() const { return band_.size(); }

  /// Entry (i, j); zero outside the band.
  [[nodiscard]] double at(std::size_t i, std::size_t j) const;
  /// Throws std::out_of_range if (i, j) lies outside the band.
  void set(std::size_t i, std::size_t j, double v);

  [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
  [[nodiscard]] double row_sum(std::size_t i) const;

  [[nodiscard]] const std::array<double, 5>& row(std::size_t i) const { return band_[i]; }

 private:
  std::vector<std::array<double, 5>> band_;
};

/// Banded LU without pivoting; fine for the diagonally-weighted SPD-like
/// systems used here. Throws std::runtime_error on a (near-)zero pivot.
class PentadiagonalLU {
 public:
  PentadiagonalLU() = default;
  explicit PentadiagonalLU(const PentadiagonalMatrix& m);

  [[nodiscard]] std::size_t size() const { return lu_.size(); }
  void solve_in_place(std::span<double> rhs) const;
  [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const;

 private:
  std::vector<std::array<double, 5>> lu_;
};

}  // namespace uavswarm

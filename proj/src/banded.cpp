#include "uavswarm/banded.hpp"

#include <cmath>
#include <stdexcept>

namespace uavswarm {

double PentadiagonalMatrix::at(std::size_t i, std::size_t j) const {
  const auto off = static_cast<long>(j) - static_cast<long>(i);
  if (off < -2 || off > 2) return 0.0;
  return band_[i][static_cast<std::size_t>(off + 2)];
}

void PentadiagonalMatrix::set(std::size_t i, std::size_t j, double v) {
  const auto off = static_cast<long>(j) - static_cast<long>(i);
  if (off < -2 || off > 2 || i >= size() || j >= size())
    throw std::out_of_range("entry outside the pentadiagonal band");
  band_[i][static_cast<std::size_t>(off + 2)] = v;
}

std::vector<double> PentadiagonalMatrix::multiply(std::span<const double> x) const {
  const std::size_t n = size();
  if (x.size() != n) throw std::invalid_argument("dimension mismatch");
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < 5; ++k) {
      const long j = static_cast<long>(i) + k - 2;
      if (j >= 0 && j < static_cast<long>(n)) acc += band_[i][k] * x[static_cast<std::size_t>(j)];
    }
    y[i] = acc;
  }
  return y;
}

double PentadiagonalMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (double v : band_[i]) s += v;
  return s;
}

PentadiagonalLU::PentadiagonalLU(const PentadiagonalMatrix& m) : lu_(m.size()) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) lu_[i] = m.row(i);
  // Doolittle elimination restricted to the band. Multipliers overwrite the
  // sub-diagonal slots.
  for (std::size_t k = 0; k < n; ++k) {
    const double pivot = lu_[k][2];
    if (std::abs(pivot) < 1e-14) throw std::runtime_error("pentadiagonal LU: zero pivot");
    for (std::size_t r = 1; r <= 2 && k + r < n; ++r) {
      const std::size_t i = k + r;
      const std::size_t slot = 2 - r;  // position of (i, k) in row i
      const double f = lu_[i][slot] / pivot;
      lu_[i][slot] = f;
      // Row i, columns k+1 .. k+2 correspond to slots slot+1 .. slot+2.
      for (std::size_t c = 1; c <= 2; ++c) lu_[i][slot + c] -= f * lu_[k][2 + c];
    }
  }
}

void PentadiagonalLU::solve_in_place(std::span<double> b) const {
  const std::size_t n = lu_.size();
  if (b.size() != n) throw std::invalid_argument("dimension mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 1) b[i] -= lu_[i][1] * b[i - 1];
    if (i >= 2) b[i] -= lu_[i][0] * b[i - 2];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = b[ii];
    if (ii + 1 < n) acc -= lu_[ii][3] * b[ii + 1];
    if (ii + 2 < n) acc -= lu_[ii][4] * b[ii + 2];
    b[ii] = acc / lu_[ii][2];
  }
}

std::vector<double> PentadiagonalLU::solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

}  // namespace uavswarm

#ifndef HYPERTRI_TESTS_SUPPORT_HPP
#define HYPERTRI_TESTS_SUPPORT_HPP

// Independent helpers for the test suites. Nothing here calls into the FFT or
// quantisation code of the library, so oracles built on it stay independent.

#include "hypertri/symbol.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace testing {

using hypertri::Complex;

/// O(n^2) forward DFT, unnormalised.
inline Eigen::VectorXcd naive_dft(const Eigen::VectorXcd& u) {
  const auto n = u.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index j = 0; j < n; ++j)
      out(k) += u(j) * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(n));
  return out;
}

/// Samples exp(i xi x) on the grid points.
inline Eigen::VectorXcd plane_wave(double xi, const hypertri::GridSpec& grid) {
  Eigen::VectorXcd out(grid.nx());
  for (int i = 0; i < grid.nx(); ++i)
    out(i) = std::polar(1.0, xi * grid.point(i));
  return out;
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  Complex complex_uniform() { return {uniform(), uniform()}; }

  Eigen::VectorXcd field(int n) {
    Eigen::VectorXcd out(n);
    for (int i = 0; i < n; ++i)
      out(i) = complex_uniform();
    return out;
  }

  /// Random combination of the modes |k| <= kmax (in units of 2 pi / L).
  Eigen::VectorXcd smooth_field(const hypertri::GridSpec& grid, int kmax) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(grid.nx());
    const double base = 2.0 * std::numbers::pi / grid.length();
    for (int k = -kmax; k <= kmax; ++k)
      out += complex_uniform() * plane_wave(base * k, grid);
    return out;
  }

  Eigen::MatrixXcd matrix(int m) {
    Eigen::MatrixXcd out(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        out(i, j) = complex_uniform();
    return out;
  }

  std::mt19937_64& engine() { return gen_; }

private:
  std::mt19937_64 gen_;
};

inline double max_abs(const Eigen::VectorXcd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

} // namespace testing

#endif

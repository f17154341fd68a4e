#include "support.hpp"

#include "hypertri/eigendata.hpp"

#include <doctest.h>

using namespace hypertri;

namespace {

ScalarSymbol c(Complex v) { return symbols::constant(v); }

} // namespace

TEST_CASE("diagonal matrix") {
  const GridSpec g(1.0, 3, 2.0 * std::numbers::pi, 8, 1.0);
  const ScalarSymbol xi = symbols::xi();
  const MatrixSymbol A = MatrixSymbol::diagonal({xi, 2.0 * xi, 3.0 * xi});
  const EigenData e = numeric_eigendata(A, g);
  REQUIRE(e.eigenvalues.size() == 3);
  REQUIRE(e.eigenvectors.size() == 2);
  CHECK(e.warnings.empty());
  for_each_shell_node(g, [&](double t, double x, double k) {
    // Branches may exchange labels across the excluded band |xi| < M, so compare as sets.
    std::vector<double> got;
    for (int a = 0; a < 3; ++a)
      got.push_back(e.eigenvalues[a](t, x, k).real());
    std::sort(got.begin(), got.end());
    std::vector<double> want{k, 2 * k, 3 * k};
    std::sort(want.begin(), want.end());
    for (int a = 0; a < 3; ++a)
      CHECK(std::abs(got[a] - want[a]) < 1e-12);
    for (int a = 0; a < 2; ++a) {
      const Eigen::VectorXcd v = evaluate(e.eigenvectors[a], t, x, k);
      const int slot = static_cast<int>(std::lround(e.eigenvalues[a](t, x, k).real() / k)) - 1;
      CHECK((v - Eigen::VectorXcd::Unit(3, slot)).norm() < 1e-12);
    }
  });
}

TEST_CASE("crossing eigenvalues") {
  const ScalarSymbol xi = symbols::xi();
  const MatrixSymbol A = MatrixSymbol::from_entries(2, {c(0.0), xi, xi, c(0.0)});
  SUBCASE("shell away from zero") {
    const GridSpec g(1.0, 2, 2.0 * std::numbers::pi, 8, 1.0);
    CHECK(numeric_eigendata(A, g).warnings.empty());
  }
  SUBCASE("shell containing zero") {
    const GridSpec g(1.0, 2, 2.0 * std::numbers::pi, 8, 0.0);
    const EigenData e = numeric_eigendata(A, g);
    REQUIRE(e.warnings.size() == 1);
    CHECK(e.warnings[0].find("multiplicity") != std::string::npos);
  }
}

TEST_CASE("recovers prescribed eigenvectors of the three-dimensional example") {
  // Coefficients halved so the third eigenvalue stays away from the prescribed pair on the whole grid.
  const GridSpec g(1.0, 5, 2.0 * std::numbers::pi, 16, 2.0);
  const ScalarSymbol xi = symbols::xi();
  const ScalarSymbol a11 = xi, a21 = 0.5 * symbols::sin(symbols::x()) * xi,
                     a31 = 0.5 * symbols::cos(symbols::t()) * xi;
  const ScalarSymbol l1 = 2.0 * xi, l2 = -xi;
  const MatrixSymbol A =
      MatrixSymbol::from_entries(3, {a11, l2 - a11, l1 - a11, a21, l2 - a21, -a21, a31, -a31, l1 - a31});
  const EigenData e = numeric_eigendata(A, g);
  CHECK(e.warnings.empty());
  const Eigen::Vector3cd h1(1, 0, 1), h2(1, 1, 0);
  for_each_shell_node(g, [&](double t, double x, double k) {
    const Eigen::MatrixXcd a = A(t, x, k);
    int matched = 0;
    for (int b = 0; b < 2; ++b) {
      const Eigen::VectorXcd v = evaluate(e.eigenvectors[b], t, x, k);
      const Complex lam = e.eigenvalues[b](t, x, k);
      CHECK((a * v - lam * v).norm() < 1e-8 * std::max(1.0, std::abs(k)));
      if (std::abs(lam - 2.0 * k) < 1e-8 * std::abs(k)) {
        CHECK((v - h1).norm() < 1e-8);
        ++matched;
      }
      if (std::abs(lam + k) < 1e-8 * std::abs(k)) {
        CHECK((v - h2).norm() < 1e-8);
        ++matched;
      }
    }
    // Branch labels follow the ordering by real part, so at least one returned branch is a prescribed one.
    CHECK(matched >= 1);
  });
}

TEST_CASE("interpolated symbols reproduce node values and vary smoothly off-grid") {
  const GridSpec g(1.0, 5, 2.0 * std::numbers::pi, 16, 1.0);
  const ScalarSymbol lam = symbols::xi() * (c(2.0) + symbols::sin(symbols::x())) * (c(1.0) + symbols::t());
  const MatrixSymbol A = MatrixSymbol::diagonal({lam, -lam});
  const EigenData e = numeric_eigendata(A, g);
  // Find which branch tracks +lam at xi = 3.
  const int b = std::abs(e.eigenvalues[0](0, 0, 3.0) - lam(0, 0, 3.0)) < 1e-12 ? 0 : 1;
  for (double t : {0.0, 0.25, 1.0})
    for (double x : {0.0, g.point(3)})
      CHECK(std::abs(e.eigenvalues[b](t, x, 3.0) - lam(t, x, 3.0)) < 1e-12);
  // Off-grid in x: trigonometric interpolation of a single harmonic is exact.
  CHECK(std::abs(e.eigenvalues[b](0.25, 0.123, 3.0) - lam(0.25, 0.123, 3.0)) < 1e-12);
  // Off-grid in t: linear interpolation of a linear function is exact.
  CHECK(std::abs(e.eigenvalues[b](0.3, 0.123, 3.0) - lam(0.3, 0.123, 3.0)) < 1e-12);
}

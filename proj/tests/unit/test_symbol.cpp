#include "support.hpp"

#include "hypertri/symbol.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace hypertri;

namespace {

GridSpec torus(int nx, int nt = 4, double M = 0.0) { return GridSpec(1.0, nt, 2.0 * std::numbers::pi, nx, M); }

} // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(GridSpec(1.0, 4, 1.0, 6), PreconditionError);
  CHECK_THROWS_AS(GridSpec(1.0, 4, 1.0, 2), PreconditionError);
  CHECK_THROWS_AS(GridSpec(1.0, 1, 1.0, 8), PreconditionError);
  CHECK_THROWS_AS(GridSpec(1.0, 4, 2.0 * std::numbers::pi, 8, 4.0), PreconditionError);
  CHECK_NOTHROW(GridSpec(1.0, 4, 2.0 * std::numbers::pi, 8, 3.5));
  const GridSpec g = torus(8, 5);
  CHECK(g.dt() == doctest::Approx(0.25));
  CHECK(g.time(4) == doctest::Approx(1.0));
}

TEST_CASE("eval_grid on constants and the frequency layout") {
  const GridSpec g = torus(4);
  const Eigen::ArrayXXcd ones = eval_grid(symbols::one(), g, 0.5);
  CHECK((ones == Complex(1.0)).all());

  const Eigen::ArrayXXcd xi = eval_grid(symbols::xi(), g, 0.0);
  const double expected[] = {0.0, 1.0, -2.0, -1.0};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      CHECK(xi(i, k).real() == expected[k]);

  CHECK(symbols::bracket_power(1.0)(0.0, 0.0, 2.0).real() == doctest::Approx(2.2360679774997896).epsilon(1e-15));
}

TEST_CASE("eval_grid rejects non-finite values with a witness") {
  const GridSpec g = torus(8);
  const ScalarSymbol bad = symbols::one() / symbols::xi();
  try {
    (void)eval_grid(bad, g, 0.0);
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.where().xi == 0.0);
  }
}

TEST_CASE("eval_grid is a pure function") {
  const GridSpec g = torus(16);
  const ScalarSymbol a = symbols::sin(symbols::x()) * symbols::xi() + symbols::cos(symbols::t()) * symbols::bracket_power(-1);
  const Eigen::ArrayXXcd first = eval_grid(a, g, 0.3);
  const Eigen::ArrayXXcd second = eval_grid(a, g, 0.3);
  CHECK((first == second).all());
}

TEST_CASE("grid evaluation agrees with point evaluation") {
  const GridSpec g = torus(16);
  const ScalarSymbol a = symbols::exp(symbols::sin(symbols::x())) * symbols::pow(symbols::bracket_power(1.0), 0.5) -
                         Complex(0.0, 2.0) * symbols::t() * symbols::xi();
  const Eigen::ArrayXXcd tab = eval_grid(a, g, 0.7);
  for (int i = 0; i < g.nx(); ++i)
    for (int k = 0; k < g.nx(); ++k)
      CHECK(std::abs(tab(i, k) - a(0.7, g.point(i), g.frequency(k))) < 1e-13);
}

TEST_CASE("estimate_order on dyadic levels") {
  const GridSpec g = torus(16);
  const std::vector<double> levels{8, 16, 32, 64};
  CHECK(estimate_order(symbols::bracket_power(1.0), g, levels) == doctest::Approx(1.0).epsilon(0.05));
  const ScalarSymbol s = symbols::bracket_power(-1.0) * symbols::sin(symbols::x());
  CHECK(estimate_order(s, g, levels) == doctest::Approx(-1.0).epsilon(0.05));
  const double z = estimate_order(symbols::zero(), g, levels);
  CHECK(std::isinf(z));
  CHECK(z < 0);
  CHECK_THROWS_AS(estimate_order(symbols::xi(), g, std::vector<double>{8, 16}), PreconditionError);
  CHECK_THROWS_AS(estimate_order(symbols::xi(), g.with_cutoff(6.0), levels), PreconditionError);
}

TEST_CASE("builders respect their declared orders") {
  const GridSpec g = torus(16);
  const std::vector<ScalarSymbol> built{
      symbols::one(),
      symbols::xi(),
      symbols::bracket_power(-2.0),
      symbols::bracket_power(0.5),
      symbols::sin(symbols::x()) * symbols::xi(),
      symbols::cos(symbols::t()) + symbols::bracket_power(-1.0),
      symbols::xi() * symbols::bracket_power(-1.0),
      symbols::exp(symbols::x()) * symbols::xi() * symbols::xi(),
      symbols::pow(symbols::bracket_power(1.0), 3.0),
      symbols::xi() / symbols::bracket_power(1.0),
  };
  for (const auto& s : built)
    CHECK(estimate_order(s, g) <= s.order() + 0.1);
}

TEST_CASE("declared order arithmetic") {
  const ScalarSymbol a = symbols::xi();
  const ScalarSymbol b = symbols::bracket_power(-1.0);
  CHECK((a * b).order() == 0.0);
  CHECK((a + b).order() == 1.0);
  CHECK((a / b).order() == 2.0);
  CHECK(std::isinf(symbols::zero().order()));
}

TEST_CASE("matrix symbols") {
  const GridSpec g = torus(8);
  const int m = 3;
  std::vector<ScalarSymbol> e;
  for (int i = 0; i < m * m; ++i)
    e.push_back(Complex(i + 1.0, 0.5 * i) * (i % 2 ? symbols::xi() : symbols::sin(symbols::x())));
  const MatrixSymbol A = MatrixSymbol::from_entries(m, e);
  const MatrixSymbol I = MatrixSymbol::identity(m);

  SUBCASE("identity is neutral") {
    const MatrixSymbol AI = A * I;
    for (double xi : g.frequencies())
      CHECK((AI(0.1, 0.4, xi) - A(0.1, 0.4, xi)).norm() == 0.0);
  }
  SUBCASE("product matches pointwise numeric product") {
    const MatrixSymbol AA = A * A;
    for (double xi : g.frequencies()) {
      const Eigen::MatrixXcd p = A(0.2, 1.3, xi) * A(0.2, 1.3, xi);
      CHECK((AA(0.2, 1.3, xi) - p).norm() <= 1e-12 * std::max(1.0, p.norm()));
    }
    CHECK(AA.order(0, 0) == 2.0);
  }
  SUBCASE("scalar scaling is entrywise") {
    const MatrixSymbol S = Complex(2.0, -1.0) * A;
    CHECK((S(0.0, 1.0, 3.0) - Complex(2.0, -1.0) * A(0.0, 1.0, 3.0)).norm() == 0.0);
  }
  SUBCASE("order arithmetic for products") {
    const MatrixSymbol P = MatrixSymbol::diagonal({symbols::xi()}) * MatrixSymbol::diagonal({symbols::bracket_power(-1)});
    CHECK(P.order(0, 0) == 0.0);
  }
  SUBCASE("dimension mismatch") { CHECK_THROWS_AS(A + MatrixSymbol::identity(2), DimensionError); }
  SUBCASE("upper-triangular certification") {
    CHECK_THROWS_AS(A.certify_upper_triangular(g, 1e-12), EvaluationError);
    std::vector<ScalarSymbol> u(m * m, symbols::zero());
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j)
        u[i * m + j] = symbols::xi();
    CHECK(MatrixSymbol::from_entries(m, u).certify_upper_triangular(g, 1e-12).upper_triangular());
  }
}

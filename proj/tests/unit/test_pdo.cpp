#include "support.hpp"

#include "hypertri/pdo.hpp"

#include <doctest.h>

#include <sstream>

using namespace hypertri;
using testing::plane_wave;

namespace {

GridSpec torus(int nx) { return GridSpec(1.0, 4, 2.0 * std::numbers::pi, nx); }

// Left quantisation written out term by term, with the O(n^2) transform.
Field naive_quantisation(const ScalarSymbol& a, double t, const Field& u, const GridSpec& g) {
  const Eigen::VectorXcd uhat = testing::naive_dft(u);
  Field out = Field::Zero(g.nx());
  for (int i = 0; i < g.nx(); ++i)
    for (int k = 0; k < g.nx(); ++k)
      out(i) += std::polar(1.0, g.point(i) * g.frequency(k)) * a(t, g.point(i), g.frequency(k)) * uhat(k);
  return out / static_cast<double>(g.nx());
}

double naive_sobolev(const Field& u, double s, const GridSpec& g) {
  const Eigen::VectorXcd uhat = testing::naive_dft(u);
  double acc = 0.0;
  for (int k = 0; k < g.nx(); ++k)
    acc += std::pow(1.0 + g.frequency(k) * g.frequency(k), s) * std::norm(uhat(k));
  return std::sqrt(acc);
}

} // namespace

TEST_CASE("identity symbol leaves fields bitwise unchanged") {
  const GridSpec g = torus(32);
  testing::Rng rng(1);
  const Field u = rng.field(g.nx());
  CHECK((apply_symbol(symbols::one(), 0.0, u, g).array() == u.array()).all());
}

TEST_CASE("Fourier multiplier on a single mode") {
  const GridSpec g = torus(16);
  const Field u = plane_wave(1.0, g);
  CHECK(testing::max_abs(apply_symbol(symbols::xi(), 0.0, u, g) - u) < 1e-14);
  const Field v = plane_wave(-3.0, g);
  CHECK(testing::max_abs(apply_symbol(symbols::xi(), 0.0, v, g) + 3.0 * v) < 1e-13);
}

TEST_CASE("x-multiplier") {
  const GridSpec g = torus(16);
  const ScalarSymbol a = symbols::sin(symbols::x()) * symbols::bracket_power(0.0);
  const Field w = apply_symbol(a, 0.0, Field::Ones(g.nx()), g);
  for (int i = 0; i < g.nx(); ++i)
    CHECK(std::abs(w(i) - std::sin(g.point(i))) < 1e-14);
}

TEST_CASE("general symbols match the term-by-term quantisation") {
  const GridSpec g = torus(16);
  testing::Rng rng(2);
  const Field u = rng.field(g.nx());
  const ScalarSymbol a = symbols::sin(symbols::x()) * symbols::xi() +
                         symbols::cos(symbols::t() + symbols::x()) * symbols::bracket_power(-1.0);
  for (double t : {0.0, 0.3, 0.9}) {
    const Field fast = apply_symbol(a, t, u, g);
    const Field slow = naive_quantisation(a, t, u, g);
    CHECK(testing::max_abs(fast - slow) < 1e-12 * std::max(1.0, testing::max_abs(slow)));
  }
}

TEST_CASE("memoised tables give the same result on repeated times") {
  const GridSpec g = torus(16);
  testing::Rng rng(3);
  const Field u = rng.field(g.nx());
  const ScalarSymbol a = symbols::cos(symbols::t()) * symbols::sin(symbols::x()) * symbols::xi();
  const QuantizedSymbol small(a, g, 0);
  const QuantizedSymbol large(a, g);
  for (int rep = 0; rep < 2; ++rep)
    for (double t : {0.1, 0.2, 0.1}) {
      const Field p = small.apply(t, u);
      const Field q = large.apply(t, u);
      CHECK((p.array() == q.array()).all());
    }
}

TEST_CASE("linearity") {
  const GridSpec g = torus(32);
  testing::Rng rng(4);
  const ScalarSymbol a = symbols::exp(symbols::sin(symbols::x())) * symbols::xi();
  for (int trial = 0; trial < 20; ++trial) {
    const Field u = rng.field(g.nx()), v = rng.field(g.nx());
    const Complex alpha = rng.complex_uniform(), beta = rng.complex_uniform();
    const Field lhs = apply_symbol(a, 0.0, alpha * u + beta * v, g);
    const Field rhs = alpha * apply_symbol(a, 0.0, u, g) + beta * apply_symbol(a, 0.0, v, g);
    CHECK(testing::max_abs(lhs - rhs) <= 1e-12 * testing::max_abs(rhs));
  }
}

TEST_CASE("Sobolev norm of a single mode") {
  for (int nx : {8, 32, 128}) {
    const GridSpec g = torus(nx);
    const Field u = plane_wave(1.0, g);
    for (double s : {0.0, 1.0, 2.5, -1.0}) {
      // Independent oracle: O(n^2) transform, then the weighted sum.
      const double oracle = naive_sobolev(u, s, g);
      CHECK(oracle == doctest::Approx(std::pow(2.0, s / 2) * nx).epsilon(1e-12));
      CHECK(sobolev_norm(u, s, g) == doctest::Approx(oracle).epsilon(1e-13));
    }
  }
  CHECK(sobolev_norm(Field::Zero(8), 3.0, torus(8)) == 0.0);
}

TEST_CASE("Parseval at s = 0 and monotonicity in s") {
  const GridSpec g = torus(64);
  testing::Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Field u = rng.field(g.nx());
    CHECK(sobolev_norm(u, 0.0, g) == doctest::Approx(std::sqrt(u.squaredNorm() * g.nx())).epsilon(1e-13));
    double prev = 0.0;
    for (double s = -2.0; s <= 3.0; s += 0.5) {
      const double v = sobolev_norm(u, s, g);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("anisotropic norms index component k by s + k") {
  const GridSpec g = torus(16);
  const Field u = plane_wave(2.0, g);
  const StateVector sv{{u, u, u}, 1.0};
  const std::vector<double> n = anisotropic_norms(sv, g);
  REQUIRE(n.size() == 3);
  for (int k = 0; k < 3; ++k)
    CHECK(n[k] == doctest::Approx(std::pow(5.0, (1.0 + k) / 2) * 16).epsilon(1e-13));
  CHECK(anisotropic_norm(sv, g) == doctest::Approx(n[0] + n[1] + n[2]));
}

TEST_CASE("frequency cutoff") {
  const GridSpec g = torus(32);
  testing::Rng rng(6);
  const Field u = rng.field(g.nx());
  CHECK((frequency_cutoff(u, 0.0, CutoffMode::High, g).array() == u.array()).all());
  CHECK(frequency_cutoff(u, 100.0, CutoffMode::High, g).isZero(0.0));
  for (double M : {0.5, 3.0, 7.5, 15.0}) {
    const Field hi = frequency_cutoff(u, M, CutoffMode::High, g);
    const Field lo = frequency_cutoff(u, M, CutoffMode::Low, g);
    CHECK(testing::max_abs(hi + lo - u) <= 1e-15 * std::max(1.0, testing::max_abs(u)));
    const Eigen::VectorXcd hhat = testing::naive_dft(hi);
    for (int k = 0; k < g.nx(); ++k)
      if (std::abs(g.frequency(k)) < M)
        CHECK(std::abs(hhat(k)) < 1e-12);
  }
}

TEST_CASE("Fourier multipliers commute with the cutoff") {
  const GridSpec g = torus(32);
  testing::Rng rng(7);
  const Field u = rng.field(g.nx());
  const ScalarSymbol a = symbols::xi() * symbols::bracket_power(0.5);
  const Field p = apply_symbol(a, 0.0, frequency_cutoff(u, 4.0, CutoffMode::High, g), g);
  const Field q = frequency_cutoff(apply_symbol(a, 0.0, u, g), 4.0, CutoffMode::High, g);
  CHECK(testing::max_abs(p - q) < 1e-12 * testing::max_abs(q));
}

TEST_CASE("operator-norm probe over dyadic modes") {
  // |2 + sin x| <= 3, so an order-1 symbol (2 + sin x) xi maps unit H^1 modes into a ball of radius 3 in H^0.
  const GridSpec g = torus(128);
  const ScalarSymbol a = (symbols::constant(2.0) + symbols::sin(symbols::x())) * symbols::xi();
  double worst = 0.0;
  for (double xi : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    const Field u = plane_wave(xi, g);
    const double ratio = sobolev_norm(apply_symbol(a, 0.0, u, g), 0.0, g) / sobolev_norm(u, 1.0, g);
    worst = std::max(worst, ratio);
  }
  CHECK(worst <= 3.0 + 1e-12);
  CHECK(worst > 1.0);
}

TEST_CASE("aliasing diagnostic") {
  const GridSpec g = torus(32);
  const StateVector smooth{{plane_wave(2.0, g)}, 0.0};
  CHECK(aliasing_warnings(smooth, g).empty());
  const StateVector rough{{plane_wave(14.0, g)}, 0.0};
  CHECK(aliasing_warnings(rough, g).size() == 1);
}

TEST_CASE("field csv round trip") {
  const GridSpec g = torus(8);
  testing::Rng rng(8);
  const Field u = rng.field(g.nx());
  std::stringstream ss;
  write_field_csv(ss, u, g);
  const Field back = read_field_csv(ss);
  CHECK((back.array() == u.array()).all());
  std::stringstream bad("x,y\n1,2\n");
  CHECK_THROWS_AS(read_field_csv(bad), ParseError);
}

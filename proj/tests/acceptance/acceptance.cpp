// Acceptance gate: one line per criterion, nonzero exit when any criterion fails.

#include "support.hpp"

#include "hypertri/cascade.hpp"
#include "hypertri/diagnostics.hpp"
#include "hypertri/schur.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

using namespace hypertri;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

ScalarSymbol c(Complex v) { return symbols::constant(v); }
const ScalarSymbol Z = symbols::zero();

MatrixSymbol constant_matrix(const Eigen::MatrixXcd& a) {
  std::vector<ScalarSymbol> e;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      e.push_back(c(a(i, j)));
  return MatrixSymbol::from_entries(static_cast<int>(a.rows()), e);
}

VectorSymbol constant_vector(const Eigen::VectorXcd& v) {
  VectorSymbol out;
  for (int i = 0; i < v.size(); ++i)
    out.push_back(c(v(i)));
  return out;
}

// Random constant matrices whose eigenvalues are pairwise at least 0.1 apart.
struct Sample {
  Eigen::MatrixXcd A;
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
};

std::vector<Sample> separated_corpus(int count, std::uint64_t seed) {
  testing::Rng rng(seed);
  std::vector<Sample> out;
  while (static_cast<int>(out.size()) < count) {
    const int m = 3 + static_cast<int>(out.size() % 2);
    const Eigen::MatrixXcd A = rng.matrix(m);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A);
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        gap = std::min(gap, std::abs(es.eigenvalues()(i) - es.eigenvalues()(j)));
    if (gap >= 0.1)
      out.push_back({A, es.eigenvalues(), es.eigenvectors()});
  }
  return out;
}

Outcome triangularisation_residual() {
  const GridSpec g(1.0, 16, kTwoPi, 64, 2.0);
  const ScalarSymbol xi = symbols::xi();
  const ScalarSymbol a11 = xi, a21 = symbols::sin(symbols::x()) * xi, a31 = symbols::cos(symbols::t()) * xi;
  const ScalarSymbol l1 = 2.0 * xi, l2 = -xi;
  const MatrixSymbol A =
      MatrixSymbol::from_entries(3, {a11, l2 - a11, l1 - a11, a21, l2 - a21, -a21, a31, -a31, l1 - a31});
  const EigenData eig{{l1, l2}, {{c(1.0), c(0.0), c(1.0)}, {c(1.0), c(1.0), c(0.0)}}, {}};
  const VerificationReport rep = verify_triangular(A, full_triangularise(A, eig, g), g, &eig);
  return {rep.residual_below_diag < 1e-10 && rep.residual_total < 1e-9,
          "residual_below_diag " + fmt(rep.residual_below_diag) + " (< 1e-10), residual_total " +
              fmt(rep.residual_total) + " (< 1e-9)"};
}

Outcome spectrum_preservation() {
  const GridSpec g(1.0, 2, kTwoPi, 8, 2.0);
  double worst = 0.0;
  for (const Sample& s : separated_corpus(100, 101)) {
    const int m = static_cast<int>(s.A.rows());
    // Prescribed order: reversed solver order, so the ordering is not inherited from the solver.
    EigenData eig;
    for (int i = m - 1; i >= 0; --i)
      eig.eigenvalues.push_back(c(s.values(i)));
    for (int i = m - 1; i >= 1; --i)
      eig.eigenvectors.push_back(constant_vector(s.vectors.col(i)));
    const TriangularResult res = full_triangularise(constant_matrix(s.A), eig, g);
    for_each_shell_node(g, [&](double t, double x, double xi) {
      const Eigen::MatrixXcd M = res.Tinv(t, x, xi) * s.A * res.T(t, x, xi);
      for (int i = 0; i < m; ++i)
        worst = std::max(worst, std::abs(M(i, i) - s.values(m - 1 - i)));
    });
  }
  return {worst < 1e-9, "max |diag(T^-1 A T) - prescribed| " + fmt(worst) + " over 100 matrices (< 1e-9)"};
}

Outcome first_column_annihilation() {
  const GridSpec g(1.0, 2, kTwoPi, 8, 2.0);
  double worst = 0.0;
  int index = 0;
  for (const Sample& s : separated_corpus(100, 101)) {
    const int m = static_cast<int>(s.A.rows());
    const int pick = index++ % m;
    const SchurStep step = schur_step(constant_matrix(s.A), c(s.values(pick)), constant_vector(s.vectors.col(pick)), g);
    for_each_shell_node(g, [&](double t, double x, double xi) {
      const Eigen::MatrixXcd M = step.Tinv(t, x, xi) * s.A * step.T(t, x, xi);
      worst = std::max(worst, M.col(0).tail(m - 1).cwiseAbs().maxCoeff());
    });
  }
  return {worst < 1e-11, "max |(T1^-1 A T1)_{i1}|, i > 1: " + fmt(worst) + " (< 1e-11)"};
}

Outcome two_by_two_closed_form() {
  // A = [[l1 - a12 mu, a12], [mu (l1 - l2 - a12 mu), l2 + a12 mu]] has eigenpair (l1, (1, mu)); the closed
  // form is T = [[1, 0], [mu, 1]], T^-1 = [[1, 0], [-mu, 1]], T^-1 A T = [[l1, a12], [0, l2]].
  testing::Rng rng(404);
  const GridSpec g(1.0, 6, kTwoPi, 16, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const ScalarSymbol X = symbols::x(), T = symbols::t(), K = symbols::xi();
    const ScalarSymbol l1 = Complex(rng.uniform(0.5, 2.0)) * K + Complex(rng.uniform()) * symbols::cos(X);
    const ScalarSymbol l2 = Complex(rng.uniform(-2.0, -0.5)) * K * (c(1.0) + 0.3 * symbols::sin(T));
    const ScalarSymbol mu = c(rng.complex_uniform()) + Complex(rng.uniform(0.0, 0.4)) * symbols::sin(X - T);
    const ScalarSymbol a12 = c(rng.complex_uniform()) * K + c(rng.complex_uniform());
    const MatrixSymbol A = MatrixSymbol::from_entries(2, {l1 - a12 * mu, a12, mu * (l1 - l2 - a12 * mu), l2 + a12 * mu});
    const TriangularResult res = full_triangularise(A, {{l1, l2}, {{c(1.0), mu}}, {}}, g);
    for_each_shell_node(g, [&](double t, double x, double xi) {
      const Complex m_ = mu(t, x, xi);
      Eigen::Matrix2cd Tc, Ti, D;
      Tc << 1, 0, m_, 1;
      Ti << 1, 0, -m_, 1;
      D << l1(t, x, xi), a12(t, x, xi), 0, l2(t, x, xi);
      Eigen::Matrix2cd N = res.N(t, x, xi);
      N(0, 0) += res.Lambda[0](t, x, xi);
      N(1, 1) += res.Lambda[1](t, x, xi);
      worst = std::max({worst, (res.T(t, x, xi) - Tc).cwiseAbs().maxCoeff(),
                        (res.Tinv(t, x, xi) - Ti).cwiseAbs().maxCoeff(), (N - D).cwiseAbs().maxCoeff()});
    });
  }
  return {worst < 1e-12, "max entrywise deviation " + fmt(worst) + " over 20 random symbol matrices (< 1e-12)"};
}

// Lambda = (xi, -xi), a12 = xi, b21 = <xi>^-1.
SystemSpec golden(const Field& w1, const Field& w2) {
  const ScalarSymbol K = symbols::xi();
  SystemSpec sp;
  sp.m = 2;
  sp.Lambda = {K, -K};
  sp.Nupper = MatrixSymbol::from_entries(2, {Z, K, Z, Z});
  sp.B = MatrixSymbol::from_entries(2, {Z, Z, symbols::bracket_power(-1.0), Z});
  sp.u0.components = {w1, w2};
  return sp;
}

Outcome cascade_vs_oracle() {
  const GridSpec g(1.0, 257, kTwoPi, 64);
  double worst = 0.0;
  for (double xi0 : {1.0, 4.0, 16.0}) {
    const Field w = testing::plane_wave(xi0, g);
    const SystemSpec sp = golden(w, 0.5 * w);
    CascadeOptions opt;
    opt.substeps = 8;
    const CascadeSolution sol = solve_cascade(sp, g, opt);
    Eigen::Matrix2cd M;
    M << xi0, xi0, 1.0 / std::sqrt(1.0 + xi0 * xi0), -xi0;
    for (int n = 0; n < g.nt(); ++n) {
      const Eigen::Vector2cd a = (Complex(0.0, g.time(n)) * M).exp() * Eigen::Vector2cd(1.0, 0.5);
      for (int k = 0; k < 2; ++k) {
        const Field exact = a(k) * w;
        worst = std::max(worst, sobolev_norm(sol.components[k][n] - exact, 0.0, g) / sobolev_norm(exact, 0.0, g));
      }
    }
  }
  return {worst < 1e-6, "max relative H^s error " + fmt(worst) + " for xi0 in {1, 4, 16}, 2048 steps (< 1e-6)"};
}

// Variable coefficients; below the diagonal b21, b32 have order -1 and b31 order -2.
SystemSpec three_level(const GridSpec& g) {
  using namespace symbols;
  const ScalarSymbol X = x(), T = t(), K = xi(), one = constant(1.0);
  SystemSpec sp;
  sp.m = 3;
  sp.Lambda = {(one + 0.3 * sin(X)) * K, -(one + 0.2 * cos(T)) * K, 0.5 * K};
  sp.Nupper =
      MatrixSymbol::from_entries(3, {Z, (c(0.5) + 0.2 * cos(X)) * K, 0.3 * K, Z, Z, 0.4 * sin(X + T) * K, Z, Z, Z});
  sp.B = MatrixSymbol::from_entries(3, {c(Complex(0, -0.3)), 0.1 * sin(X), Z, cos(X) * bracket_power(-1.0), Z, Z,
                                        sin(X) * bracket_power(-2.0), 0.5 * bracket_power(-1.0), Z});
  testing::Rng rng(606);
  for (int i = 0; i < 3; ++i)
    sp.u0.components.push_back(rng.smooth_field(g, 3));
  return sp;
}

Outcome cascade_vs_reference() {
  const GridSpec g(1.0, 33, kTwoPi, 32);
  const SystemSpec sp = three_level(g);
  CascadeOptions opt;
  opt.substeps = 4;
  const CascadeSolution a = solve_cascade(sp, g, opt), b = solve_reference(sp, g, opt.substeps);
  double gap = 0.0;
  for (int k = 0; k < 3; ++k) {
    double num = 0.0, den = 0.0;
    for (int n = 0; n < g.nt(); ++n) {
      num = std::max(num, sobolev_norm(a.components[k][n] - b.components[k][n], sp.s + k, g));
      den = std::max(den, sobolev_norm(b.components[k][n], sp.s + k, g));
    }
    gap = std::max(gap, num / den);
  }
  const ConvergenceReport rep = refinement_study(sp, g.with_time(1.0, 17), {1, 2, 4, 8, 16}, RefinementTarget::Finest, opt);
  bool orders_ok = rep.monotone && !rep.orders.empty();
  std::string orders;
  for (double o : rep.orders) {
    orders_ok = orders_ok && o >= 3.5 && o <= 4.5;
    orders += (orders.empty() ? "" : ", ") + fmt(o);
  }
  return {gap < 1e-3 && orders_ok, "discrepancy " + fmt(gap) + " (< 1e-3); temporal orders " + orders + " (in [3.5, 4.5])"};
}

Outcome exponential_bound_stability() {
  CascadeOptions opt;
  opt.substeps = 4;
  std::vector<double> fits;
  for (int scale : {1, 2}) {
    const GridSpec g(1.0, 32 * scale + 1, kTwoPi, 32 * scale);
    const SystemSpec sp = three_level(g);
    fits.push_back(fit_solution_growth(solve_cascade(sp, g, opt), anisotropic_norm(sp.u0, g)).c_fit);
  }
  const double change = std::abs(fits[1] - fits[0]) / std::abs(fits[0]);

  const GridSpec base(1.0, 33, kTwoPi, 8);
  const Field w = testing::plane_wave(1.0, base);
  const GrowthReport growth =
      demo_loss_of_regularity(golden(w, Field::Zero(8)), base, {8, 16, 32, 64, 128, 256}, GrowthMethod::Cascade, opt);
  return {fits[0] > 0.0 && change < 0.1 && std::abs(growth.exponent) <= 0.1,
          "c " + fmt(fits[0]) + " -> " + fmt(fits[1]) + " (change " + fmt(100 * change) +
              "% < 10%); growth exponent " + fmt(growth.exponent) + " (0 +- 0.1)"};
}

Outcome sharpness_contrast() {
  const ScalarSymbol K = symbols::xi();
  SystemSpec sp;
  sp.m = 2;
  sp.Lambda = {Z, Z};
  sp.Nupper = MatrixSymbol::from_entries(2, {Z, K, Z, Z});
  sp.B = MatrixSymbol::from_entries(2, {Z, Z, c(-1.0), Z});
  sp.u0.components = {Field::Zero(8), Field::Zero(8)};
  sp.override_levi = true;
  const GridSpec base(1.0, 33, kTwoPi, 8);
  const GrowthReport r = demo_loss_of_regularity(sp, base, {8, 16, 32, 64, 128, 256}, GrowthMethod::Oracle);
  return {r.exponent >= 0.5 && !r.hypotheses.passes(), "per-mode growth exponent " + fmt(r.exponent) + " (>= 0.5)"};
}

Outcome neumann_scaling() {
  const GridSpec g(1.0, 257, kTwoPi, 64);
  bool pass = true;
  std::string detail = "rho(T/2)/rho(T):";
  for (double xi0 : {1.0, 4.0, 16.0}) {
    const Field w = testing::plane_wave(xi0, g);
    const SystemSpec sp = golden(w, 0.5 * w);
    double rho[2];
    for (int half = 0; half < 2; ++half) {
      CascadeOptions opt;
      opt.substeps = 8;
      opt.initial_slab_steps = 2048 >> half;
      const CascadeSolution sol = solve_cascade(sp, g, opt);
      rho[half] = sol.neumann_stats.front().levels.front().solve.rho;
    }
    const double ratio = rho[1] / rho[0];
    pass = pass && ratio >= 0.35 && ratio <= 0.65;
    detail += " xi0=" + fmt(xi0) + ": " + fmt(ratio);
  }
  return {pass, detail + " (each in [0.35, 0.65])"};
}

Outcome propagator_order_and_unitarity() {
  const GridSpec coarse(1.0, 2, kTwoPi, 16);
  const double xi0 = 6.0;
  const Field theta = testing::plane_wave(xi0, coarse);
  // lambda = (1 + 0.5 cos t) xi: the mode picks up the phase xi0 (t + 0.5 sin t).
  const ScalarSymbol lam = (c(1.0) + 0.5 * symbols::cos(symbols::t())) * symbols::xi();
  const Field exact = std::polar(1.0, xi0 * (1.0 + 0.5 * std::sin(1.0))) * theta;
  std::vector<double> errs;
  for (int sub : {16, 32, 64, 128})
    errs.push_back(testing::max_abs(solve_homogeneous({lam, Z, sub}, theta, coarse).back() - exact));
  bool pass = true;
  std::string orders;
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    const double o = std::log2(errs[i] / errs[i + 1]);
    pass = pass && o >= 3.5 && o <= 4.5;
    orders += (orders.empty() ? "" : ", ") + fmt(o);
  }

  const GridSpec g(1.0, 101, kTwoPi, 32);
  testing::Rng rng(1010);
  const Field u = rng.smooth_field(g, 6);
  const double base = sobolev_norm(u, 0.0, g);
  double drift = 0.0;
  for (const Field& f : solve_homogeneous({lam, Z, 4}, u, g))
    drift = std::max(drift, std::abs(sobolev_norm(f, 0.0, g) - base) / base);
  pass = pass && drift < 1e-8;
  return {pass, "RK4 orders " + orders + " (in [3.5, 4.5]); H^0 drift " + fmt(drift) + " (< 1e-8)"};
}

Outcome fio_cross_check() {
  const GridSpec g(1.0, 201, kTwoPi, 32);
  const ScalarSymbol lam = (c(1.0) + 0.5 * symbols::cos(symbols::t())) * symbols::xi();
  const int substeps = 4;
  const Phase phi = explicit_phase(lam, g, substeps);
  const Field theta = testing::plane_wave(1.0, g) + Complex(0.5, 0.2) * testing::plane_wave(-4.0, g) +
                      0.3 * testing::plane_wave(7.0, g);
  const FieldSeries w = solve_homogeneous({lam, Z, substeps}, theta, g);
  double worst = 0.0;
  for (int n = 0; n < g.nt(); ++n)
    worst = std::max(worst, testing::max_abs(fio_apply(phi, symbols::one(), g.time(n), theta, g) - w[n]));
  return {worst < 1e-6, "max |FIO - time stepping| " + fmt(worst) + " on three modes (< 1e-6)"};
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome cli_contract() {
  const fs::path fx = HYPERTRI_FIXTURES;
  const std::string cli = HYPERTRI_CLI;
  const fs::path tmp = fs::temp_directory_path() / ("hypertri-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(tmp);
  auto tri = [&](const std::string& f, const std::string& out) {
    return run(cli + " triangularise --scenario " + (fx / (f + ".json")).string() + " --out " + (tmp / out).string());
  };
  auto solve = [&](const std::string& f, const std::string& out, const std::string& extra = "") {
    return run(cli + " solve --scenario " + (fx / (f + ".json")).string() + " --out " + (tmp / out).string() + extra);
  };
  auto verify = [&](const std::string& out) { return run(cli + " verify --out " + (tmp / out).string()); };

  std::vector<std::pair<int, int>> checks;  // (expected, got)
  checks.push_back({0, tri("tri_three_level", "tri")});
  checks.push_back({0, solve("solve_golden", "s1", " --mode both --seed 11")});
  checks.push_back({0, solve("solve_golden", "s2", " --mode both --seed 11")});
  checks.push_back({0, verify("s1")});
  {
    std::string text = slurp(tmp / "s1" / "norms.csv");
    text.replace(text.rfind(',') + 1, std::string::npos, "1e300\n");
    std::ofstream(tmp / "s1" / "norms.csv", std::ios::binary) << text;
  }
  checks.push_back({1, verify("s1")});
  checks.push_back({1, tri("tri_tight_tolerance", "t")});
  checks.push_back({2, tri("tri_vanishing", "c")});
  checks.push_back({3, solve("solve_levi_violation", "h")});
  checks.push_back({4, solve("solve_unstable", "u")});
  checks.push_back({5, tri("tri_bad_eigenpair", "b")});
  checks.push_back({64, tri("malformed", "m")});
  checks.push_back({64, run(cli + " solve --mode sideways --scenario x --out y")});
  checks.push_back({66, tri("no_such_fixture", "n")});
  checks.push_back({66, verify("absent")});

  const bool identical = slurp(tmp / "s2" / "report.json") == slurp(tmp / "s1" / "report.json") &&
                         !slurp(tmp / "s2" / "report.json").empty();
  const std::string seeded = slurp(tmp / "s2" / "report.json");
  fs::remove_all(tmp);

  bool pass = identical;
  std::string codes;
  for (const auto& [want, got] : checks) {
    pass = pass && want == got;
    codes += (codes.empty() ? "" : " ") + std::to_string(got) + (want == got ? "" : "(want " + std::to_string(want) + ")");
  }
  return {pass && seeded.find("\"seed\": 11") != std::string::npos,
          std::string("report.json ") + (identical ? "byte-identical" : "differs") + "; exit codes " + codes};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"triangularisation residual", triangularisation_residual},
      {"spectrum preservation", spectrum_preservation},
      {"first-column annihilation", first_column_annihilation},
      {"2x2 closed form", two_by_two_closed_form},
      {"cascade vs per-mode oracle", cascade_vs_oracle},
      {"cascade vs reference", cascade_vs_reference},
      {"exponential-bound stability", exponential_bound_stability},
      {"sharpness contrast", sharpness_contrast},
      {"Neumann contraction scaling", neumann_scaling},
      {"propagator order and unitarity", propagator_order_and_unitarity},
      {"FIO cross-check", fio_cross_check},
      {"determinism and CLI contract", cli_contract},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %-32s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

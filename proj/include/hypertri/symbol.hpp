#ifndef HYPERTRI_SYMBOL_HPP
#define HYPERTRI_SYMBOL_HPP

#include "hypertri/errors.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace hypertri {

using Complex = std::complex<double>;

class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Discretisation of [0, T] x torus(L) x dual frequencies.
///
/// Frequencies follow the DFT layout: index k < nx/2 maps to 2*pi*k/L, the
/// remaining indices to 2*pi*(k - nx)/L.
class GridSpec {
public:
  GridSpec(double T_final, int nt, double L, int nx, double M = 0.0);

  double T_final() const noexcept { return T_final_; }
  int nt() const noexcept { return nt_; }
  double length() const noexcept { return L_; }
  int nx() const noexcept { return nx_; }
  double cutoff() const noexcept { return M_; }

  double dt() const noexcept { return T_final_ / (nt_ - 1); }
  double time(int n) const noexcept { return n * dt(); }
  double point(int i) const noexcept { return i * L_ / nx_; }
  double frequency(int k) const noexcept;
  double max_frequency() const noexcept;

  const Eigen::ArrayXd& points() const noexcept { return points_; }
  const Eigen::ArrayXd& frequencies() const noexcept { return frequencies_; }
  Eigen::ArrayXd times() const;

  /// Indices k with |xi_k| >= M, in transform order.
  std::vector<int> shell_indices() const;

  GridSpec with_time(double T_final, int nt) const { return {T_final, nt, L_, nx_, M_}; }
  GridSpec with_space(double L, int nx) const { return {T_final_, nt_, L, nx, M_}; }
  GridSpec with_cutoff(double M) const { return {T_final_, nt_, L_, nx_, M}; }

private:
  double T_final_;
  int nt_;
  double L_;
  int nx_;
  double M_;
  Eigen::ArrayXd points_;
  Eigen::ArrayXd frequencies_;
};

/// Japanese bracket (1 + xi^2)^(1/2).
inline double bracket(double xi) { return std::sqrt(1.0 + xi * xi); }

/// Which of (t, x, xi) a symbol actually reads. Used to skip work, never to change results.
struct Dependence {
  bool t = true;
  bool x = true;
  bool xi = true;

  friend Dependence operator|(Dependence a, Dependence b) { return {a.t || b.t, a.x || b.x, a.xi || b.xi}; }
};

/// A function a(t, x, xi) with a declared symbol order.
///
/// Immutable, cheap to copy (shared implementation). Besides point evaluation a
/// symbol may carry a vectorised grid evaluator; composite symbols built with the
/// arithmetic below propagate both.
class ScalarSymbol {
public:
  using PointFn = std::function<Complex(double t, double x, double xi)>;
  /// Returns the array a(t, x_i, xi_k), rows indexed by x, columns by xi.
  using GridFn = std::function<Eigen::ArrayXXcd(double t, const Eigen::ArrayXd& x, const Eigen::ArrayXd& xi)>;

  ScalarSymbol(PointFn f, double order, Dependence dep = {});
  ScalarSymbol(PointFn f, GridFn g, double order, Dependence dep = {});

  Complex operator()(double t, double x, double xi) const { return impl_->point(t, x, xi); }

  /// Sample on the tensor grid x by xi at time t.
  Eigen::ArrayXXcd sample(double t, const Eigen::ArrayXd& x, const Eigen::ArrayXd& xi) const;

  double order() const noexcept { return impl_->order; }
  const Dependence& dependence() const noexcept { return impl_->dep; }
  bool depends_on_t() const noexcept { return impl_->dep.t; }
  bool depends_on_x() const noexcept { return impl_->dep.x; }
  bool depends_on_xi() const noexcept { return impl_->dep.xi; }

  ScalarSymbol with_order(double order) const;

private:
  struct Impl {
    PointFn point;
    GridFn grid;
    double order;
    Dependence dep;
  };
  std::shared_ptr<const Impl> impl_;
};

using VectorSymbol = std::vector<ScalarSymbol>;

namespace symbols {

ScalarSymbol constant(Complex c);
ScalarSymbol zero();
ScalarSymbol one();
/// a(t, x, xi) = xi, order 1.
ScalarSymbol xi();
/// <xi>^p, order p.
ScalarSymbol bracket_power(double p);
ScalarSymbol t();
ScalarSymbol x();

/// Order-0 symbol depending on x only.
ScalarSymbol of_x(std::function<Complex(double)> f);
/// Order-0 symbol depending on t only.
ScalarSymbol of_t(std::function<Complex(double)> f);

ScalarSymbol sin(const ScalarSymbol& a);
ScalarSymbol cos(const ScalarSymbol& a);
ScalarSymbol exp(const ScalarSymbol& a);
/// a^p for a real constant p; order scales with p.
ScalarSymbol pow(const ScalarSymbol& a, double p);
ScalarSymbol conj(const ScalarSymbol& a);

} // namespace symbols

ScalarSymbol operator+(const ScalarSymbol& a, const ScalarSymbol& b);
ScalarSymbol operator-(const ScalarSymbol& a, const ScalarSymbol& b);
ScalarSymbol operator*(const ScalarSymbol& a, const ScalarSymbol& b);
/// Quotient; declared order is order(a) - order(b).
ScalarSymbol operator/(const ScalarSymbol& a, const ScalarSymbol& b);
ScalarSymbol operator-(const ScalarSymbol& a);
ScalarSymbol operator*(Complex c, const ScalarSymbol& a);
inline ScalarSymbol operator*(const ScalarSymbol& a, Complex c) { return c * a; }

/// Samples sym on the (x, xi) grid at time t; throws EvaluationError on non-finite values.
Eigen::ArrayXXcd eval_grid(const ScalarSymbol& sym, const GridSpec& grid, double t);

/// Dyadic frequencies lo, 2 lo, ..., up to hi inclusive.
std::vector<double> dyadic_levels(double lo = 8.0, double hi = 512.0);

/// Least-squares slope of log sup_{t,x}|a(t,x,+-xi)| against log <xi> over the levels.
/// Returns -infinity when the symbol vanishes on every level.
double estimate_order(const ScalarSymbol& sym, const GridSpec& grid, std::span<const double> levels);
double estimate_order(const ScalarSymbol& sym, const GridSpec& grid);

/// m x m matrix of symbols with per-entry declared orders.
///
/// Stored as a single matrix-valued closure so products of matrix symbols
/// evaluate each factor once per point.
class MatrixSymbol {
public:
  using MatrixFn = std::function<Eigen::MatrixXcd(double t, double x, double xi)>;

  MatrixSymbol(int dim, MatrixFn f, Eigen::MatrixXd orders);

  static MatrixSymbol from_entries(int dim, const std::vector<ScalarSymbol>& row_major);
  static MatrixSymbol identity(int dim);
  static MatrixSymbol zero(int dim);
  static MatrixSymbol diagonal(const VectorSymbol& d);

  int dim() const noexcept { return dim_; }
  Eigen::MatrixXcd operator()(double t, double x, double xi) const { return (*f_)(t, x, xi); }
  const Eigen::MatrixXd& orders() const noexcept { return orders_; }
  double order(int i, int j) const { return orders_(i, j); }

  /// Entry (i, j), zero-based. Returns the original symbol when built from entries.
  ScalarSymbol entry(int i, int j) const;

  bool upper_triangular() const noexcept { return upper_; }
  /// Verifies that strictly-lower entries vanish on the grid (within tol) and returns a flagged copy.
  MatrixSymbol certify_upper_triangular(const GridSpec& grid, double tol) const;

private:
  int dim_;
  std::shared_ptr<const MatrixFn> f_;
  Eigen::MatrixXd orders_;
  std::shared_ptr<const std::vector<ScalarSymbol>> entries_;
  bool upper_ = false;
};

MatrixSymbol operator+(const MatrixSymbol& a, const MatrixSymbol& b);
MatrixSymbol operator-(const MatrixSymbol& a, const MatrixSymbol& b);
MatrixSymbol operator*(const MatrixSymbol& a, const MatrixSymbol& b);
MatrixSymbol operator*(Complex c, const MatrixSymbol& a);
MatrixSymbol operator*(const ScalarSymbol& s, const MatrixSymbol& a);
/// Matrix-vector product of symbols.
VectorSymbol operator*(const MatrixSymbol& a, const VectorSymbol& v);

/// Evaluates a vector symbol at a point.
Eigen::VectorXcd evaluate(const VectorSymbol& v, double t, double x, double xi);

} // namespace hypertri

#endif

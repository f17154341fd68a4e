#ifndef HYPERTRI_PROPAGATORS_HPP
#define HYPERTRI_PROPAGATORS_HPP

#include "hypertri/pdo.hpp"

#include <functional>
#include <optional>

namespace hypertri {

/// Scalar characteristic problem D_t w = (lambda + b)(t, x, D) w + g, with D_t = -i d/dt.
struct PropagatorConfig {
  ScalarSymbol lambda;
  ScalarSymbol b_diag = symbols::zero();
  /// RK4 steps per grid interval.
  int substeps = 1;
  /// Bound on |Im lambda| over the grid.
  double tol_real = 1e-10;

  /// Throws PreconditionError on substeps < 1 or a non-real lambda.
  void validate(const GridSpec& grid, double t_start = 0.0) const;
};

/// Source term evaluated at absolute time t.
using Source = std::function<Field(double t)>;

/// A time-indexed series on the levels t_start + n dt seen as a continuous source.
///
/// Between levels the series is read through the cubic Lagrange polynomial on
/// the four nearest levels (shifted inwards at the ends), which keeps the
/// interpolation error below the RK4 truncation error for smooth sources.
Source interpolate_series(const FieldSeries& g, const GridSpec& grid, double t_start = 0.0);

/// Right-hand side rate bound used by the stability guard: max over the grid of |c(t)|.
using RateBound = std::function<double(double t)>;
using Rhs = std::function<Eigen::VectorXcd(double t, const Eigen::VectorXcd& y)>;

/// Classical four-stage Runge-Kutta on the grid's time levels.
///
/// Takes (nt - 1) * substeps uniform steps from t_start and returns y at the nt
/// grid levels; result[0] is y0 itself. Before each step the guard
/// h * max(rate(t), rate(t + h/2), rate(t + h)) <= 1 is enforced, and any
/// non-finite state aborts; both raise InstabilityError.
FieldSeries integrate_rk4(const Rhs& rhs, const RateBound& rate, const Eigen::VectorXcd& y0, const GridSpec& grid,
                          int substeps, double t_start = 0.0);

/// Solution operator of one scalar characteristic problem on a fixed grid.
///
/// Holds the quantised lambda + b so that repeated solves (Neumann iterations)
/// reuse the evaluated symbol tables.
class ScalarPropagator {
public:
  ScalarPropagator(PropagatorConfig cfg, GridSpec grid, double t_start = 0.0);

  /// G0 theta: homogeneous solve with w(t_start) = theta.
  FieldSeries homogeneous(const Field& theta) const;
  /// G g: inhomogeneous solve with zero data.
  FieldSeries inhomogeneous(const Source& g) const;
  FieldSeries inhomogeneous(const FieldSeries& g) const;
  /// G0 theta + G g in one sweep.
  FieldSeries solve(const Field& theta, const Source& g) const;

  const GridSpec& grid() const noexcept { return grid_; }
  double t_start() const noexcept { return t_start_; }
  const PropagatorConfig& config() const noexcept { return cfg_; }

private:
  FieldSeries run(const Field& theta, const Source* g) const;

  PropagatorConfig cfg_;
  GridSpec grid_;
  double t_start_;
  QuantizedSymbol op_;
};

FieldSeries solve_homogeneous(const PropagatorConfig& cfg, const Field& theta, const GridSpec& grid);
FieldSeries solve_inhomogeneous(const PropagatorConfig& cfg, const FieldSeries& g, const GridSpec& grid);
FieldSeries solve_inhomogeneous(const PropagatorConfig& cfg, const Source& g, const GridSpec& grid);

/// Phase of the form x xi + psi(t, s, xi), the eikonal solution for x-independent lambda.
class Phase {
public:
  using Increment = std::function<double(double t, double s, double xi)>;

  explicit Phase(Increment psi) : psi_(std::move(psi)) {}

  double operator()(double t, double s, double x, double xi) const { return x * xi + psi_(t, s, xi); }
  /// phi(t, s, x, xi) - x xi.
  double increment(double t, double s, double xi) const { return psi_(t, s, xi); }

private:
  Increment psi_;
};

/// phi(t, s, x, xi) = x xi + int_s^t lambda(tau, xi) dtau by composite Simpson.
///
/// The quadrature uses the grid's substep spacing (rounded up to an even panel
/// count). Throws NotXIndependent when lambda varies in x by more than 1e-12
/// on the grid.
Phase explicit_phase(const ScalarSymbol& lambda_xi, const GridSpec& grid, int substeps = 1);

/// (1/nx) sum_k exp(i phi(t, 0, x_i, xi_k)) amp(t, x_i, xi_k) thetahat_k.
Field fio_apply(const Phase& phase, const ScalarSymbol& amp, double t, const Field& theta, const GridSpec& grid);

struct SmallTimeBounds {
  /// max over probes and grid times of ||G0 theta(t)||_s / ||theta||_s.
  double C0 = 0.0;
  /// max over probes and positive grid times of ||G g(t)||_s / (t sup ||g||_s).
  double C1 = 0.0;
};

/// Frequencies 0, +-1, +-2, +-4, ... (in units of 2 pi / L) below a quarter of nx.
std::vector<int> dyadic_probe_indices(const GridSpec& grid);

/// Measures the constants of the small-time propagator bounds on single-mode probes.
SmallTimeBounds measure_small_time_bounds(const PropagatorConfig& cfg, const GridSpec& grid, double s);

} // namespace hypertri

#endif

#ifndef HYPERTRI_CASCADE_HPP
#define HYPERTRI_CASCADE_HPP

#include "hypertri/propagators.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hypertri {

/// First-order system D_t u = (Lambda + N + B)(t, x, D) u + f with Lambda diagonal and N strictly upper.
struct SystemSpec {
  int m = 0;
  VectorSymbol Lambda;
  /// Strictly upper part a_ij, i < j.
  MatrixSymbol Nupper = MatrixSymbol::zero(1);
  MatrixSymbol B = MatrixSymbol::zero(1);
  /// Source per component at absolute time t; an empty function means zero.
  std::vector<Source> f;
  /// Data; component k (zero-based) is measured in H^(s + k).
  StateVector u0;
  double s = 0.0;
  bool override_levi = false;

  /// Coupling symbol acting on u_j in row i: b_ij below the diagonal, a_ij + b_ij above it.
  ScalarSymbol coupling(int i, int j) const;
  /// lambda_i + b_ii.
  ScalarSymbol diagonal(int i) const;
  /// Source of component i at time t (zero when absent).
  Field source(int i, double t, int nx) const;
  bool has_source(int i) const { return i < static_cast<int>(f.size()) && static_cast<bool>(f[i]); }
};

/// Source functions reading time-indexed series (cubic interpolation between levels).
std::vector<Source> sources_from_series(const std::vector<FieldSeries>& f, const GridSpec& grid);

struct OrderCheck {
  /// One-based entry (i, j), i > j.
  int i = 0;
  int j = 0;
  double estimated = 0.0;
  double required = 0.0;
  bool pass = true;
};

struct HypothesisReport {
  std::vector<OrderCheck> levi;
  double max_imag_lambda = 0.0;
  bool lambda_real = true;
  double max_lower_N = 0.0;
  bool n_strictly_upper = true;
  bool data_finite = true;
  std::vector<std::string> issues;

  bool passes() const;
};

/// Checks the structural hypotheses of the well-posedness theorem. Report-only.
HypothesisReport check_hypotheses(const SystemSpec& spec, const GridSpec& grid, double tol_order = 0.1);

/// sum_{j<i} b_ij u_j + sum_{j>i} (a_ij + b_ij) u_j at time t (zero-based i).
Field component_rhs(const SystemSpec& spec, int i, const StateVector& u, double t, const GridSpec& grid);

struct NeumannStats {
  /// Applications of the operator.
  int iterations = 0;
  /// Geometric mean of successive increment ratios (0 when fewer than two increments).
  double rho = 0.0;
  bool converged = false;
  std::vector<double> increments;
};

using SeriesOperator = std::function<FieldSeries(const FieldSeries&)>;

/// sup over the series of the H^sigma norm.
double series_norm(const FieldSeries& u, double sigma, const GridSpec& grid);

/// v = sum_k G^k rhs, stopped when an increment falls below tol_fp ||rhs|| in sup_t H^sigma.
///
/// Throws NotContractive when three consecutive increment ratios are >= 1; a
/// series that merely exhausts max_iter is returned with converged = false.
FieldSeries neumann_invert(const SeriesOperator& apply_G, const FieldSeries& rhs, const GridSpec& grid, double sigma,
                           double tol_fp = 1e-10, int max_iter = 200, NeumannStats* stats = nullptr);

struct CascadeOptions {
  double tol_fp = 1e-10;
  int max_iter = 200;
  /// RK4 steps per grid interval; the cascade works on this substep mesh.
  int substeps = 1;
  /// First slab length in substeps; 0 means the whole horizon.
  int initial_slab_steps = 0;
  int min_slab_steps = 4;
};

struct LevelStats {
  int level = 0;
  /// Number of Neumann inversions performed at this level.
  int inversions = 0;
  int total_iterations = 0;
  int max_iterations = 0;
  double rho_max = 0.0;
  /// Inversion on the data path (the one that produces u_level itself).
  NeumannStats solve;
};

struct SlabStats {
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<LevelStats> levels;
};

struct CascadeSolution {
  std::vector<double> times;
  /// components[k][n] = u_k at times[n].
  std::vector<FieldSeries> components;
  std::vector<double> slab_boundaries;
  std::vector<SlabStats> neumann_stats;
  /// norm_trace[n][k] = ||u_k(times[n])||_{H^(s+k)}.
  std::vector<std::vector<double>> norm_trace;
  /// Number of slab halvings triggered by non-contraction.
  int halvings = 0;

  StateVector at(std::size_t n, double s) const;
};

/// Solution by back-substitution and Neumann inversion of the level operators, with slab continuation.
/// Throws SolveFailure when the slab would shrink below min_slab_steps.
CascadeSolution solve_cascade(const SystemSpec& spec, const GridSpec& grid, const CascadeOptions& opt = {});

/// Method of lines on the full coupled system with the same RK4 contract.
CascadeSolution solve_reference(const SystemSpec& spec, const GridSpec& grid, int substeps = 1);

/// Intermediate fields of the first slab, sampled on the substep mesh.
struct CascadeIntermediates {
  GridSpec mesh;
  /// U_i^0 = G_i^0 u_i^0 + G_i f_i.
  std::vector<FieldSeries> U0;
  /// Utilde_k^0 for k < m - 1: the level-k data with all lower components set to zero.
  std::vector<FieldSeries> Utilde0;
};
CascadeIntermediates cascade_intermediates(const SystemSpec& spec, const GridSpec& grid, const CascadeOptions& opt = {});

/// Applies the level-k operator (lower components zero, data off) to v on the first slab.
FieldSeries apply_level_operator(const SystemSpec& spec, const GridSpec& grid, int k, const FieldSeries& v,
                                 const CascadeOptions& opt = {});

enum class GrowthMethod { Oracle, Reference, Cascade };

struct GrowthPoint {
  double xi0 = 0.0;
  /// sup_t of the solution map's operator norm in the summed anisotropic norm.
  double amplification = 0.0;
  /// Same with every component measured in H^s.
  double amplification_isotropic = 0.0;
};

struct GrowthReport {
  std::vector<GrowthPoint> points;
  /// Least-squares slope of log amplification against log xi0.
  double exponent = 0.0;
  double exponent_isotropic = 0.0;
  HypothesisReport hypotheses;
};

/// Single-mode amplification across a frequency ladder.
///
/// Each rung uses its own torus L = 2 pi / xi0 so that xi0 is the first
/// harmonic and nx stays small; RK4 substeps are raised per rung to satisfy the
/// stability guard with margin 2. The Oracle method requires symbols that do
/// not depend on t or x and exponentiates the per-mode matrix. Requires
/// passing hypotheses or spec.override_levi.
GrowthReport demo_loss_of_regularity(const SystemSpec& spec, const GridSpec& grid, const std::vector<double>& ladder,
                                     GrowthMethod method, const CascadeOptions& opt = {});

/// Per-mode system matrix M(xi) with u' = i M u, for symbols independent of t and x.
Eigen::MatrixXcd mode_matrix(const SystemSpec& spec, double xi);

/// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace hypertri

#endif

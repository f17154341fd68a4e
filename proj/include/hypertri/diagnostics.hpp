#ifndef HYPERTRI_DIAGNOSTICS_HPP
#define HYPERTRI_DIAGNOSTICS_HPP

#include "hypertri/cascade.hpp"

#include <string>
#include <vector>

namespace hypertri {

struct GrowthFit {
  /// Slope of the fitted log-norm, clipped below at 0.
  double c_fit = 0.0;
  double raw_slope = 0.0;
  double intercept = 0.0;
  /// max_n |norm_n / fitted_n - 1|.
  double residual = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  /// Set when the residual exceeds the flag threshold: the trace is not exponential.
  bool flagged = false;
};

/// Least-squares fit of log(total_n / data_norm) = intercept + slope t_n.
///
/// Needs at least four strictly positive samples (PreconditionError otherwise);
/// a zero or non-finite data norm raises DegenerateData.
GrowthFit fit_exponential_bound(const std::vector<double>& times, const std::vector<double>& totals, double data_norm,
                                double flag_threshold = 0.05);

/// Fit on the summed anisotropic norm trace of a solution.
GrowthFit fit_solution_growth(const CascadeSolution& sol, double data_norm, double flag_threshold = 0.05);

struct ConvergenceReport {
  /// Time step (dt / substeps) per rung.
  std::vector<double> steps;
  std::vector<double> errors;
  /// log2(e_k / e_{k+1}) per consecutive pair, NaN where either error sits on the floor.
  std::vector<double> orders;
  /// Every error is at or below the floor.
  bool saturated = false;
  /// Errors strictly decrease along the ladder.
  bool monotone = false;
  std::vector<std::string> warnings;
};

/// Orders from a ladder of (step, error) pairs; the factor between steps is taken from the steps themselves.
ConvergenceReport convergence_orders(const std::vector<double>& steps, const std::vector<double>& errors,
                                     double floor = 1e-12);

enum class RefinementTarget {
  /// Per-mode matrix exponential applied to every Fourier coefficient (symbols independent of t and x).
  Oracle,
  /// Cascade against the reference solver at the same resolution.
  Reference,
  /// Cascade against the cascade on the finest rung.
  Finest,
};

/// Temporal refinement of the cascade: rung f uses nt = (base.nt - 1) f + 1.
///
/// The error of a rung is the largest, over components k, of the sup-in-t
/// relative H^(s+k) discrepancy at the base grid's time levels. Aliasing
/// warnings on the data are passed through.
ConvergenceReport refinement_study(const SystemSpec& spec, const GridSpec& base, const std::vector<int>& factors,
                                   RefinementTarget target, const CascadeOptions& opt = {}, double floor = 1e-12);

/// Largest sup-in-t relative H^(s+k) discrepancy over components, compared at the levels of the coarser solution.
double relative_discrepancy(const CascadeSolution& a, const GridSpec& ga, const CascadeSolution& b, const GridSpec& gb,
                            double s);

/// Per-mode exponential of a constant-coefficient system applied to the data, at the grid's time levels.
CascadeSolution mode_oracle_solution(const SystemSpec& spec, const GridSpec& grid);

struct OperatorNormProbe {
  std::vector<int> probes;
  /// ||a(t, x, D) e_k||_{H^(s - order)} / ||e_k||_{H^s} per probe, maximised over grid times.
  std::vector<double> ratios;
  double max_ratio = 0.0;
};

/// Measures the H^s -> H^(s - order) bound of a(t, x, D) on dyadic single-mode probes.
OperatorNormProbe probe_operator_norm(const ScalarSymbol& a, const GridSpec& grid, double s, double order);

} // namespace hypertri

#endif

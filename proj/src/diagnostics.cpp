#include "hypertri/diagnostics.hpp"

#include "hypertri/fft.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <numbers>

namespace hypertri {

GrowthFit fit_exponential_bound(const std::vector<double>& times, const std::vector<double>& totals, double data_norm,
                                double flag_threshold) {
  if (!(data_norm > 0.0) || !std::isfinite(data_norm))
    throw DegenerateData("growth fit: data norm must be positive and finite");
  if (times.size() != totals.size() || times.size() < 4)
    throw PreconditionError("growth fit: need at least four matching samples");
  const double n = static_cast<double>(times.size());
  std::vector<double> y;
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(totals[i] > 0.0) || !std::isfinite(totals[i]))
      throw PreconditionError("growth fit: norm trace must be positive and finite");
    y.push_back(std::log(totals[i] / data_norm));
    st += times[i];
    sy += y.back();
    stt += times[i] * times[i];
    sty += times[i] * y.back();
  }
  const double den = n * stt - st * st;
  if (!(den > 0.0))
    throw PreconditionError("growth fit: times must not all coincide");
  GrowthFit fit;
  fit.raw_slope = (n * sty - st * sy) / den;
  fit.intercept = (sy - fit.raw_slope * st) / n;
  fit.c_fit = std::max(0.0, fit.raw_slope);
  for (std::size_t i = 0; i < times.size(); ++i)
    fit.residual = std::max(fit.residual, std::abs(std::expm1(y[i] - fit.intercept - fit.raw_slope * times[i])));
  fit.window_start = times.front();
  fit.window_end = times.back();
  fit.flagged = fit.residual > flag_threshold;
  return fit;
}

GrowthFit fit_solution_growth(const CascadeSolution& sol, double data_norm, double flag_threshold) {
  std::vector<double> totals;
  for (const auto& row : sol.norm_trace) {
    double acc = 0.0;
    for (double v : row)
      acc += v;
    totals.push_back(acc);
  }
  return fit_exponential_bound(sol.times, totals, data_norm, flag_threshold);
}

ConvergenceReport convergence_orders(const std::vector<double>& steps, const std::vector<double>& errors, double floor) {
  if (steps.size() != errors.size())
    throw DimensionError("convergence: steps and errors differ in length");
  ConvergenceReport rep;
  rep.steps = steps;
  rep.errors = errors;
  rep.saturated = !errors.empty();
  rep.monotone = true;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    rep.saturated = rep.saturated && errors[i] <= floor;
    if (i + 1 < errors.size()) {
      rep.monotone = rep.monotone && errors[i + 1] < errors[i];
      const bool usable = errors[i] > floor && errors[i + 1] > floor;
      rep.orders.push_back(usable ? std::log(errors[i] / errors[i + 1]) / std::log(steps[i] / steps[i + 1])
                                  : std::numeric_limits<double>::quiet_NaN());
    }
  }
  return rep;
}

double relative_discrepancy(const CascadeSolution& a, const GridSpec& ga, const CascadeSolution& b, const GridSpec& gb,
                            double s) {
  if (ga.nx() != gb.nx() || a.components.size() != b.components.size())
    throw DimensionError("discrepancy: solutions live on different spaces");
  const bool a_coarse = a.times.size() <= b.times.size();
  const CascadeSolution& coarse = a_coarse ? a : b;
  const CascadeSolution& fine = a_coarse ? b : a;
  const std::size_t nc = coarse.times.size() - 1, nf = fine.times.size() - 1;
  if (nc == 0 || nf % nc != 0)
    throw DimensionError("discrepancy: time levels are not nested");
  const std::size_t r = nf / nc;
  double worst = 0.0;
  for (std::size_t k = 0; k < coarse.components.size(); ++k) {
    double num = 0.0, den = 0.0;
    const double sigma = s + static_cast<double>(k);
    for (std::size_t n = 0; n <= nc; ++n) {
      num = std::max(num, sobolev_norm(coarse.components[k][n] - fine.components[k][n * r], sigma, ga));
      den = std::max(den, sobolev_norm(fine.components[k][n * r], sigma, ga));
    }
    if (den > 0.0)
      worst = std::max(worst, num / den);
    else if (num > 0.0)
      worst = std::numeric_limits<double>::infinity();
  }
  return worst;
}

CascadeSolution mode_oracle_solution(const SystemSpec& spec, const GridSpec& grid) {
  for (int i = 0; i < spec.m; ++i)
    if (spec.has_source(i))
      throw PreconditionError("mode oracle: sources are not supported");
  const int m = spec.m, nx = grid.nx();
  std::vector<Eigen::VectorXcd> hat;
  for (const Field& u : spec.u0.components)
    hat.push_back(fft::forward(u));
  std::vector<Eigen::MatrixXcd> Ms;
  for (int q = 0; q < nx; ++q)
    Ms.push_back(mode_matrix(spec, grid.frequency(q)));

  CascadeSolution sol;
  sol.components.assign(static_cast<std::size_t>(m), FieldSeries{});
  for (int n = 0; n < grid.nt(); ++n) {
    const double t = grid.time(n);
    sol.times.push_back(t);
    std::vector<Eigen::VectorXcd> out(static_cast<std::size_t>(m), Eigen::VectorXcd(nx));
    for (int q = 0; q < nx; ++q) {
      Eigen::VectorXcd a(m);
      for (int k = 0; k < m; ++k)
        a(k) = hat[static_cast<std::size_t>(k)](q);
      const Eigen::VectorXcd b = (Complex(0.0, t) * Ms[static_cast<std::size_t>(q)]).exp() * a;
      for (int k = 0; k < m; ++k)
        out[static_cast<std::size_t>(k)](q) = b(k);
    }
    for (int k = 0; k < m; ++k)
      sol.components[static_cast<std::size_t>(k)].push_back(n == 0 ? spec.u0.components[static_cast<std::size_t>(k)]
                                                                   : Field(fft::inverse(out[static_cast<std::size_t>(k)])));
  }
  sol.slab_boundaries.push_back(0.0);
  for (std::size_t n = 0; n < sol.times.size(); ++n) {
    std::vector<double> row;
    for (int k = 0; k < m; ++k)
      row.push_back(sobolev_norm(sol.components[static_cast<std::size_t>(k)][n], spec.s + k, grid));
    sol.norm_trace.push_back(std::move(row));
  }
  return sol;
}

ConvergenceReport refinement_study(const SystemSpec& spec, const GridSpec& base, const std::vector<int>& factors,
                                   RefinementTarget target, const CascadeOptions& opt, double floor) {
  if (factors.size() < 3)
    throw PreconditionError("refinement: need at least three rungs");
  std::vector<GridSpec> grids;
  std::vector<CascadeSolution> sols;
  std::vector<double> steps, errors;
  for (int f : factors) {
    if (f < 1)
      throw PreconditionError("refinement: factors must be positive");
    grids.push_back(base.with_time(base.T_final(), (base.nt() - 1) * f + 1));
    sols.push_back(solve_cascade(spec, grids.back(), opt));
    steps.push_back(grids.back().dt() / opt.substeps);
  }
  if (target == RefinementTarget::Finest) {
    const std::size_t last = sols.size() - 1;
    for (std::size_t i = 0; i + 1 < sols.size(); ++i)
      errors.push_back(relative_discrepancy(sols[i], grids[i], sols[last], grids[last], spec.s));
    steps.pop_back();
  } else {
    for (std::size_t i = 0; i < sols.size(); ++i) {
      const CascadeSolution other = target == RefinementTarget::Oracle ? mode_oracle_solution(spec, grids[i])
                                                                       : solve_reference(spec, grids[i], opt.substeps);
      errors.push_back(relative_discrepancy(sols[i], grids[i], other, grids[i], spec.s));
    }
  }
  ConvergenceReport rep = convergence_orders(steps, errors, floor);
  rep.warnings = aliasing_warnings(spec.u0, base);
  return rep;
}

OperatorNormProbe probe_operator_norm(const ScalarSymbol& a, const GridSpec& grid, double s, double order) {
  OperatorNormProbe out;
  const QuantizedSymbol q(a, grid);
  for (int k : dyadic_probe_indices(grid)) {
    const double xi = 2.0 * std::numbers::pi * k / grid.length();
    const Field e = sample_field([xi](double x) { return std::polar(1.0, xi * x); }, grid);
    const double base = sobolev_norm(e, s, grid);
    double worst = 0.0;
    for (int n = 0; n < grid.nt(); ++n)
      worst = std::max(worst, sobolev_norm(q.apply(grid.time(n), e), s - order, grid) / base);
    out.probes.push_back(k);
    out.ratios.push_back(worst);
    out.max_ratio = std::max(out.max_ratio, worst);
  }
  return out;
}

} // namespace hypertri

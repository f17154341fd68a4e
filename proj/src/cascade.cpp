#include "hypertri/cascade.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

namespace hypertri {

namespace {

constexpr Complex I{0.0, 1.0};

bool vanishes(const ScalarSymbol& a) {
  if (std::isinf(a.order()) && a.order() < 0)
    return true;
  return !a.depends_on_t() && !a.depends_on_x() && !a.depends_on_xi() && a(0.0, 0.0, 0.0) == Complex(0.0);
}

ScalarSymbol sum_or_single(const ScalarSymbol& a, const ScalarSymbol& b) {
  if (vanishes(a))
    return b;
  if (vanishes(b))
    return a;
  return a + b;
}

FieldSeries zeros(std::size_t levels, int nx) { return FieldSeries(levels, Field::Zero(nx)); }

void accumulate(FieldSeries& acc, const FieldSeries& add) {
  for (std::size_t n = 0; n < acc.size(); ++n)
    acc[n] += add[n];
}

void check_spec(const SystemSpec& spec, const GridSpec& grid) {
  const int m = spec.m;
  if (m < 1 || static_cast<int>(spec.Lambda.size()) != m || spec.Nupper.dim() != m || spec.B.dim() != m ||
      spec.u0.size() != m)
    throw DimensionError("system: inconsistent sizes for m = " + std::to_string(m));
  for (const Field& c : spec.u0.components)
    if (c.size() != grid.nx())
      throw DimensionError("system: data length differs from nx");
  if (spec.f.size() > static_cast<std::size_t>(m))
    throw DimensionError("system: more sources than components");
}

// Quantised coupling symbols; absent entries are identically zero.
struct Couplings {
  std::vector<std::optional<QuantizedSymbol>> c;
  int m;

  Couplings(const SystemSpec& spec, const GridSpec& grid) : c(static_cast<std::size_t>(spec.m * spec.m)), m(spec.m) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (i == j)
          continue;
        const ScalarSymbol s = spec.coupling(i, j);
        if (!vanishes(s))
          c[static_cast<std::size_t>(i * m + j)].emplace(s, grid);
      }
  }

  const std::optional<QuantizedSymbol>& operator()(int i, int j) const { return c[static_cast<std::size_t>(i * m + j)]; }
};

void merge(LevelStats& into, const NeumannStats& st) {
  ++into.inversions;
  into.total_iterations += st.iterations;
  into.max_iterations = std::max(into.max_iterations, st.iterations);
  into.rho_max = std::max(into.rho_max, st.rho);
}

// One slab [t0, t0 + n h] of the cascade on the substep mesh.
class Slab {
public:
  Slab(const SystemSpec& spec, const GridSpec& grid, const CascadeOptions& opt, double t0, int steps, double h,
       const std::vector<Field>& data)
      : spec_(spec), opt_(opt), mesh_(steps * h, steps + 1, grid.length(), grid.nx(), grid.cutoff()), t0_(t0),
        coup_(spec, mesh_) {
    stats_.resize(static_cast<std::size_t>(spec.m));
    for (int k = 0; k < spec.m; ++k) {
      stats_[static_cast<std::size_t>(k)].level = k;
      PropagatorConfig cfg{spec.Lambda[static_cast<std::size_t>(k)], spec.B.entry(k, k), 1};
      props_.emplace_back(cfg, mesh_, t0);
    }
    for (int k = 0; k < spec.m; ++k) {
      const ScalarPropagator& p = props_[static_cast<std::size_t>(k)];
      U0_.push_back(spec.has_source(k) ? p.solve(data[static_cast<std::size_t>(k)], spec.f[static_cast<std::size_t>(k)])
                                       : p.homogeneous(data[static_cast<std::size_t>(k)]));
    }
  }

  std::vector<FieldSeries> solve() { return solve_from(0, {}, true); }

  // Level-k map v -> U_k (when data) + G_k(sum_{j<k} c_kj lower_j + sum_{l>k} c_kl u_l(lower, v)).
  FieldSeries level_map(int k, const std::vector<const FieldSeries*>& lower, const FieldSeries* v, bool data) {
    std::vector<const FieldSeries*> lo = lower;
    lo.push_back(v);
    std::vector<FieldSeries> ups;
    if (k + 1 < spec_.m)
      ups = solve_from(k + 1, lo, data);
    std::vector<std::pair<int, const FieldSeries*>> terms;
    for (int j = 0; j < k; ++j)
      if (lower[static_cast<std::size_t>(j)])
        terms.emplace_back(j, lower[static_cast<std::size_t>(j)]);
    for (int l = k + 1; l < spec_.m; ++l)
      terms.emplace_back(l, &ups[static_cast<std::size_t>(l - k - 1)]);
    FieldSeries out = data ? U0_[static_cast<std::size_t>(k)] : zeros(levels(), nx());
    FieldSeries arg = zeros(levels(), nx());
    bool any = false;
    for (const auto& [j, u] : terms) {
      const auto& c = coup_(k, j);
      if (!c)
        continue;
      any = true;
      for (std::size_t n = 0; n < levels(); ++n)
        arg[n] += c->apply(time(n), (*u)[n]);
    }
    if (any)
      accumulate(out, props_[static_cast<std::size_t>(k)].inhomogeneous(arg));
    return out;
  }

  const GridSpec& mesh() const { return mesh_; }
  const std::vector<FieldSeries>& U0() const { return U0_; }
  const std::vector<LevelStats>& stats() const { return stats_; }

private:
  std::size_t levels() const { return static_cast<std::size_t>(mesh_.nt()); }
  int nx() const { return mesh_.nx(); }
  double time(std::size_t n) const { return t0_ + static_cast<double>(n) * mesh_.dt(); }

  // u_k, ..., u_{m-1} given u_0, ..., u_{k-1} (null entries are zero).
  std::vector<FieldSeries> solve_from(int k, const std::vector<const FieldSeries*>& lower, bool data) {
    std::vector<FieldSeries> out;
    if (k == spec_.m - 1) {
      out.push_back(level_map(k, lower, nullptr, data));
      return out;
    }
    const FieldSeries rhs = level_map(k, lower, nullptr, data);
    const std::vector<const FieldSeries*> none(static_cast<std::size_t>(k), nullptr);
    const SeriesOperator apply_G = [this, k, &none](const FieldSeries& v) { return level_map(k, none, &v, false); };
    NeumannStats st;
    FieldSeries uk = neumann_invert(apply_G, rhs, mesh_, spec_.s + k, opt_.tol_fp, opt_.max_iter, &st);
    LevelStats& ls = stats_[static_cast<std::size_t>(k)];
    merge(ls, st);
    if (data)
      ls.solve = st;
    if (!st.converged)
      throw NotContractive("level " + std::to_string(k + 1) + " did not converge in " +
                               std::to_string(opt_.max_iter) + " iterations",
                           st.rho);
    std::vector<const FieldSeries*> lo = lower;
    lo.push_back(&uk);
    std::vector<FieldSeries> ups = solve_from(k + 1, lo, data);
    out.push_back(std::move(uk));
    for (auto& u : ups)
      out.push_back(std::move(u));
    return out;
  }

  const SystemSpec& spec_;
  const CascadeOptions& opt_;
  GridSpec mesh_;
  double t0_;
  Couplings coup_;
  std::vector<ScalarPropagator> props_;
  std::vector<FieldSeries> U0_;
  std::vector<LevelStats> stats_;
};

int total_steps(const GridSpec& grid, const CascadeOptions& opt) {
  if (opt.substeps < 1)
    throw PreconditionError("cascade: substeps must be >= 1");
  return (grid.nt() - 1) * opt.substeps;
}

int first_slab(const GridSpec& grid, const CascadeOptions& opt) {
  const int N = total_steps(grid, opt);
  return opt.initial_slab_steps > 0 ? std::min(opt.initial_slab_steps, N) : N;
}

void fill_norms(CascadeSolution& sol, const GridSpec& grid, double s) {
  sol.norm_trace.clear();
  for (std::size_t n = 0; n < sol.times.size(); ++n) {
    std::vector<double> row;
    for (std::size_t k = 0; k < sol.components.size(); ++k)
      row.push_back(sobolev_norm(sol.components[k][n], s + static_cast<double>(k), grid));
    sol.norm_trace.push_back(std::move(row));
  }
}

double rate_at(const std::vector<std::optional<QuantizedSymbol>>& ops, int m, double t) {
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    double row = 0.0;
    for (int j = 0; j < m; ++j)
      if (const auto& q = ops[static_cast<std::size_t>(i * m + j)])
        row += q->max_modulus(t);
    worst = std::max(worst, row);
  }
  return worst;
}

} // namespace

ScalarSymbol SystemSpec::coupling(int i, int j) const {
  if (i == j)
    throw DimensionError("coupling: diagonal entry requested");
  return j < i ? B.entry(i, j) : sum_or_single(Nupper.entry(i, j), B.entry(i, j));
}

ScalarSymbol SystemSpec::diagonal(int i) const {
  return sum_or_single(Lambda[static_cast<std::size_t>(i)], B.entry(i, i));
}

Field SystemSpec::source(int i, double t, int nx) const {
  return has_source(i) ? f[static_cast<std::size_t>(i)](t) : Field::Zero(nx);
}

std::vector<Source> sources_from_series(const std::vector<FieldSeries>& f, const GridSpec& grid) {
  std::vector<Source> out;
  for (const FieldSeries& s : f)
    out.push_back(interpolate_series(s, grid));
  return out;
}

bool HypothesisReport::passes() const {
  if (!lambda_real || !n_strictly_upper || !data_finite)
    return false;
  return std::all_of(levi.begin(), levi.end(), [](const OrderCheck& c) { return c.pass; });
}

HypothesisReport check_hypotheses(const SystemSpec& spec, const GridSpec& grid, double tol_order) {
  check_spec(spec, grid);
  HypothesisReport rep;
  const int m = spec.m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < i; ++j) {
      const ScalarSymbol b = spec.B.entry(i, j);
      OrderCheck c;
      c.i = i + 1;
      c.j = j + 1;
      c.required = j - i;
      c.estimated = vanishes(b) ? -std::numeric_limits<double>::infinity() : estimate_order(b, grid);
      c.pass = c.estimated <= c.required + tol_order;
      if (!c.pass) {
        std::ostringstream os;
        os << "b_" << c.i << c.j << " has estimated order " << c.estimated << ", required " << c.required;
        rep.issues.push_back(os.str());
      }
      rep.levi.push_back(c);
    }

  for (int n = 0; n < grid.nt(); ++n) {
    const double t = grid.time(n);
    for (int i = 0; i < m; ++i) {
      const ScalarSymbol& l = spec.Lambda[static_cast<std::size_t>(i)];
      rep.max_imag_lambda = std::max(rep.max_imag_lambda, eval_grid(l, grid, t).imag().abs().maxCoeff());
      for (int j = 0; j <= i; ++j) {
        const ScalarSymbol a = spec.Nupper.entry(i, j);
        if (!vanishes(a))
          rep.max_lower_N = std::max(rep.max_lower_N, eval_grid(a, grid, t).abs().maxCoeff());
      }
    }
  }
  rep.lambda_real = rep.max_imag_lambda <= 1e-10;
  if (!rep.lambda_real)
    rep.issues.push_back("Lambda is not real (max |Im| = " + std::to_string(rep.max_imag_lambda) + ")");
  rep.n_strictly_upper = rep.max_lower_N <= 1e-12;
  if (!rep.n_strictly_upper)
    rep.issues.push_back("N has non-vanishing entries on or below the diagonal");

  for (int k = 0; k < m; ++k) {
    const Field& c = spec.u0.components[static_cast<std::size_t>(k)];
    if (!std::isfinite(sobolev_norm(c, spec.s + k, grid))) {
      rep.data_finite = false;
      rep.issues.push_back("u0 component " + std::to_string(k + 1) + " is not finite");
    }
    if (!spec.has_source(k))
      continue;
    for (int n = 0; n < grid.nt(); ++n)
      if (!std::isfinite(sobolev_norm(spec.source(k, grid.time(n), grid.nx()), spec.s + k, grid))) {
        rep.data_finite = false;
        rep.issues.push_back("f component " + std::to_string(k + 1) + " is not finite at t = " +
                             std::to_string(grid.time(n)));
        break;
      }
  }
  return rep;
}

Field component_rhs(const SystemSpec& spec, int i, const StateVector& u, double t, const GridSpec& grid) {
  if (i < 0 || i >= spec.m || u.size() != spec.m)
    throw DimensionError("component_rhs: index or state size out of range");
  Field out = Field::Zero(grid.nx());
  for (int j = 0; j < spec.m; ++j) {
    if (j == i)
      continue;
    const ScalarSymbol c = spec.coupling(i, j);
    if (!vanishes(c))
      out += apply_symbol(c, t, u.components[static_cast<std::size_t>(j)], grid);
  }
  return out;
}

double series_norm(const FieldSeries& u, double sigma, const GridSpec& grid) { return sup_sobolev_norm(u, sigma, grid); }

FieldSeries neumann_invert(const SeriesOperator& apply_G, const FieldSeries& rhs, const GridSpec& grid, double sigma,
                           double tol_fp, int max_iter, NeumannStats* stats) {
  NeumannStats st;
  FieldSeries v = rhs;
  const double base = series_norm(rhs, sigma, grid);
  if (!std::isfinite(base))
    throw SolveFailure("neumann: right-hand side is not finite");
  st.increments.push_back(base);
  if (base == 0.0) {
    st.converged = true;
    if (stats)
      *stats = st;
    return v;
  }
  FieldSeries inc = rhs;
  int growing = 0;
  double log_sum = 0.0;
  int ratios = 0;
  while (st.iterations < max_iter) {
    inc = apply_G(inc);
    const double norm = series_norm(inc, sigma, grid);
    ++st.iterations;
    st.increments.push_back(norm);
    if (!std::isfinite(norm))
      throw NotContractive("neumann: increment is not finite", std::numeric_limits<double>::infinity());
    const double prev = st.increments[st.increments.size() - 2];
    const double ratio = norm / prev;
    if (norm > 0.0) {
      log_sum += std::log(ratio);
      ++ratios;
    }
    st.rho = ratios > 0 ? std::exp(log_sum / ratios) : 0.0;
    growing = ratio >= 1.0 ? growing + 1 : 0;
    if (growing >= 3)
      throw NotContractive("neumann: increments stopped contracting", st.rho);
    accumulate(v, inc);
    if (norm < tol_fp * base) {
      st.converged = true;
      break;
    }
  }
  if (stats)
    *stats = st;
  return v;
}

StateVector CascadeSolution::at(std::size_t n, double s) const {
  StateVector out;
  out.sobolev_base = s;
  for (const FieldSeries& c : components)
    out.components.push_back(c[n]);
  return out;
}

CascadeSolution solve_cascade(const SystemSpec& spec, const GridSpec& grid, const CascadeOptions& opt) {
  check_spec(spec, grid);
  const int m = spec.m;
  const int N = total_steps(grid, opt);
  const double h = grid.dt() / opt.substeps;

  CascadeSolution sol;
  sol.components.assign(static_cast<std::size_t>(m), FieldSeries(static_cast<std::size_t>(grid.nt())));
  for (int k = 0; k < m; ++k)
    sol.components[static_cast<std::size_t>(k)][0] = spec.u0.components[static_cast<std::size_t>(k)];
  for (int n = 0; n < grid.nt(); ++n)
    sol.times.push_back(grid.time(n));
  sol.slab_boundaries.push_back(0.0);

  std::vector<Field> state = spec.u0.components;
  int len = first_slab(grid, opt);
  int pos = 0;
  while (pos < N) {
    const int steps = std::min(len, N - pos);
    std::optional<Slab> slab;
    std::vector<FieldSeries> u;
    try {
      slab.emplace(spec, grid, opt, pos * h, steps, h, state);
      u = slab->solve();
    } catch (const NotContractive& e) {
      if (len / 2 < opt.min_slab_steps)
        throw SolveFailure(std::string("cascade: slab below ") + std::to_string(opt.min_slab_steps) +
                           " steps at t = " + std::to_string(pos * h) + ": " + e.what());
      len /= 2;
      ++sol.halvings;
      continue;
    }
    SlabStats ss{pos * h, (pos + steps) * h, slab->stats()};
    sol.neumann_stats.push_back(std::move(ss));
    for (int n = 1; n <= steps; ++n) {
      const int g = pos + n;
      if (g % opt.substeps != 0)
        continue;
      for (int k = 0; k < m; ++k)
        sol.components[static_cast<std::size_t>(k)][static_cast<std::size_t>(g / opt.substeps)] =
            u[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)];
    }
    for (int k = 0; k < m; ++k)
      state[static_cast<std::size_t>(k)] = u[static_cast<std::size_t>(k)].back();
    pos += steps;
    if (pos < N)
      sol.slab_boundaries.push_back(pos * h);
  }
  fill_norms(sol, grid, spec.s);
  return sol;
}

CascadeSolution solve_reference(const SystemSpec& spec, const GridSpec& grid, int substeps) {
  check_spec(spec, grid);
  const int m = spec.m, nx = grid.nx();
  std::vector<std::optional<QuantizedSymbol>> ops(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const ScalarSymbol s = i == j ? spec.diagonal(i) : spec.coupling(i, j);
      if (!vanishes(s))
        ops[static_cast<std::size_t>(i * m + j)].emplace(s, grid);
    }
  const Rhs rhs = [&](double t, const Eigen::VectorXcd& y) {
    Eigen::VectorXcd out(y.size());
    for (int i = 0; i < m; ++i) {
      Field acc = spec.source(i, t, nx);
      for (int j = 0; j < m; ++j)
        if (const auto& q = ops[static_cast<std::size_t>(i * m + j)])
          acc += q->apply(t, y.segment(j * nx, nx));
      out.segment(i * nx, nx) = I * acc;
    }
    return out;
  };
  const RateBound rate = [&](double t) { return rate_at(ops, m, t); };
  Eigen::VectorXcd y0(m * nx);
  for (int k = 0; k < m; ++k)
    y0.segment(k * nx, nx) = spec.u0.components[static_cast<std::size_t>(k)];
  const FieldSeries ys = integrate_rk4(rhs, rate, y0, grid, substeps);

  CascadeSolution sol;
  sol.components.assign(static_cast<std::size_t>(m), FieldSeries{});
  for (int n = 0; n < grid.nt(); ++n) {
    sol.times.push_back(grid.time(n));
    for (int k = 0; k < m; ++k)
      sol.components[static_cast<std::size_t>(k)].push_back(ys[static_cast<std::size_t>(n)].segment(k * nx, nx));
  }
  for (int k = 0; k < m; ++k)
    sol.components[static_cast<std::size_t>(k)][0] = spec.u0.components[static_cast<std::size_t>(k)];
  sol.slab_boundaries.push_back(0.0);
  fill_norms(sol, grid, spec.s);
  return sol;
}

CascadeIntermediates cascade_intermediates(const SystemSpec& spec, const GridSpec& grid, const CascadeOptions& opt) {
  check_spec(spec, grid);
  const int steps = first_slab(grid, opt);
  Slab slab(spec, grid, opt, 0.0, steps, grid.dt() / opt.substeps, spec.u0.components);
  CascadeIntermediates out{slab.mesh(), slab.U0(), {}};
  for (int k = 0; k + 1 < spec.m; ++k)
    out.Utilde0.push_back(slab.level_map(k, std::vector<const FieldSeries*>(static_cast<std::size_t>(k), nullptr),
                                         nullptr, true));
  return out;
}

FieldSeries apply_level_operator(const SystemSpec& spec, const GridSpec& grid, int k, const FieldSeries& v,
                                 const CascadeOptions& opt) {
  check_spec(spec, grid);
  if (k < 0 || k >= spec.m)
    throw DimensionError("apply_level_operator: level out of range");
  const int steps = first_slab(grid, opt);
  Slab slab(spec, grid, opt, 0.0, steps, grid.dt() / opt.substeps, spec.u0.components);
  if (v.size() != static_cast<std::size_t>(steps + 1))
    throw DimensionError("apply_level_operator: series length differs from the slab mesh");
  return slab.level_map(k, std::vector<const FieldSeries*>(static_cast<std::size_t>(k), nullptr), &v, false);
}

Eigen::MatrixXcd mode_matrix(const SystemSpec& spec, double xi) {
  const int m = spec.m;
  Eigen::MatrixXcd M(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const ScalarSymbol s = i == j ? spec.diagonal(i) : spec.coupling(i, j);
      if (!vanishes(s) && (s.depends_on_t() || s.depends_on_x()))
        throw PreconditionError("mode_matrix: entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                ") depends on t or x");
      M(i, j) = vanishes(s) ? Complex(0.0) : s(0.0, 0.0, xi);
    }
  return M;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DimensionError("log_log_slope: need at least two matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GrowthReport demo_loss_of_regularity(const SystemSpec& spec, const GridSpec& grid, const std::vector<double>& ladder,
                                     GrowthMethod method, const CascadeOptions& opt) {
  GrowthReport rep;
  rep.hypotheses = check_hypotheses(spec, grid);
  if (!rep.hypotheses.passes() && !spec.override_levi)
    throw PreconditionError("growth demo: hypotheses fail and override_levi is not set");
  const int m = spec.m;
  std::vector<double> amp, amp_iso;
  for (double xi0 : ladder) {
    if (!(xi0 > 0.0))
      throw PreconditionError("growth demo: ladder frequencies must be positive");
    const GridSpec g(grid.T_final(), grid.nt(), 2.0 * std::numbers::pi / xi0, grid.nx(), 0.0);
    const double br = bracket(xi0);
    // Both norms are weighted l1 sums over components, so the induced operator norm is the
    // largest response to unit data in a single component.
    auto aniso = [&](const Eigen::VectorXcd& a) {
      double acc = 0.0;
      for (int k = 0; k < m; ++k)
        acc += g.nx() * std::abs(a(k)) * std::pow(br, spec.s + k);
      return acc;
    };
    auto iso = [&](const Eigen::VectorXcd& a) { return g.nx() * a.cwiseAbs().sum() * std::pow(br, spec.s); };
    auto unit = [&](int k, double weight) {
      Eigen::VectorXcd a = Eigen::VectorXcd::Zero(m);
      a(k) = 1.0 / (g.nx() * std::pow(br, weight));
      return a;
    };

    GrowthPoint p{xi0, 0.0, 0.0};
    if (method == GrowthMethod::Oracle) {
      const Eigen::MatrixXcd M = mode_matrix(spec, xi0);
      for (int n = 0; n < g.nt(); ++n) {
        const Eigen::MatrixXcd E = (I * M * g.time(n)).exp();
        for (int k = 0; k < m; ++k) {
          p.amplification = std::max(p.amplification, aniso(E * unit(k, spec.s + k)));
          p.amplification_isotropic = std::max(p.amplification_isotropic, iso(E * unit(k, spec.s)));
        }
      }
    } else {
      // Substeps chosen so that h * (row-sum rate) <= 1/2 at the first and last level.
      std::vector<std::optional<QuantizedSymbol>> ops(static_cast<std::size_t>(m * m));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          const ScalarSymbol s = i == j ? spec.diagonal(i) : spec.coupling(i, j);
          if (!vanishes(s))
            ops[static_cast<std::size_t>(i * m + j)].emplace(s, g);
        }
      const double rate = std::max(rate_at(ops, m, 0.0), rate_at(ops, m, g.T_final()));
      CascadeOptions o = opt;
      o.substeps = std::max(opt.substeps, static_cast<int>(std::ceil(2.0 * g.dt() * rate)));
      auto run = [&](const Eigen::VectorXcd& a) {
        SystemSpec sp = spec;
        sp.f.clear();
        sp.u0.components.clear();
        sp.u0.sobolev_base = spec.s;
        for (int k = 0; k < m; ++k)
          sp.u0.components.push_back(a(k) * sample_field([&](double x) { return std::polar(1.0, xi0 * x); }, g));
        return method == GrowthMethod::Reference ? solve_reference(sp, g, o.substeps) : solve_cascade(sp, g, o);
      };
      for (int k = 0; k < m; ++k) {
        const CascadeSolution sa = run(unit(k, spec.s + k)), si = run(unit(k, spec.s));
        for (std::size_t n = 0; n < sa.times.size(); ++n) {
          double an = 0.0, in = 0.0;
          for (int j = 0; j < m; ++j) {
            an += sa.norm_trace[n][static_cast<std::size_t>(j)];
            in += sobolev_norm(si.components[static_cast<std::size_t>(j)][n], spec.s, g);
          }
          p.amplification = std::max(p.amplification, an);
          p.amplification_isotropic = std::max(p.amplification_isotropic, in);
        }
      }
    }
    rep.points.push_back(p);
    amp.push_back(p.amplification);
    amp_iso.push_back(p.amplification_isotropic);
  }
  if (ladder.size() >= 2) {
    rep.exponent = log_log_slope(ladder, amp);
    rep.exponent_isotropic = log_log_slope(ladder, amp_iso);
  }
  return rep;
}

} // namespace hypertri

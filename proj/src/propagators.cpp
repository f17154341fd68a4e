#include "hypertri/propagators.hpp"

#include "hypertri/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hypertri {

namespace {

constexpr Complex kI{0.0, 1.0};

bool finite(const Eigen::VectorXcd& y) { return y.allFinite(); }

} // namespace

void PropagatorConfig::validate(const GridSpec& grid, double t_start) const {
  if (substeps < 1)
    throw PreconditionError("propagator: substeps must be >= 1");
  const int nt = lambda.depends_on_t() ? grid.nt() : 1;
  for (int n = 0; n < nt; ++n) {
    const double t = t_start + grid.time(n);
    const Eigen::ArrayXXcd vals = lambda.sample(t, grid.points(), grid.frequencies());
    Eigen::Index i = 0, k = 0;
    const double worst = vals.imag().abs().maxCoeff(&i, &k);
    if (!(worst <= tol_real))
      throw PreconditionError("propagator: lambda is not real on the grid (|Im| = " + std::to_string(worst) +
                              " at " + to_string(Witness{t, grid.points()(i), grid.frequencies()(k)}) + ")");
  }
}

Source interpolate_series(const FieldSeries& g, const GridSpec& grid, double t_start) {
  if (static_cast<int>(g.size()) != grid.nt())
    throw DimensionError("source series has " + std::to_string(g.size()) + " levels, grid has " +
                         std::to_string(grid.nt()));
  const double dt = grid.dt();
  const int levels = grid.nt();
  return [g, dt, levels, t_start](double t) -> Field {
    const double tau = (t - t_start) / dt;
    const double nearest = std::round(tau);
    if (std::abs(tau - nearest) < 1e-9 && nearest >= 0 && nearest < levels)
      return g[static_cast<std::size_t>(nearest)];
    const int width = std::min(levels, 4);
    const int base = std::clamp(static_cast<int>(std::floor(tau)) - 1, 0, levels - width);
    Field out = Field::Zero(g[0].size());
    for (int a = 0; a < width; ++a) {
      double w = 1.0;
      for (int b = 0; b < width; ++b)
        if (b != a)
          w *= (tau - (base + b)) / static_cast<double>(a - b);
      out += w * g[static_cast<std::size_t>(base + a)];
    }
    return out;
  };
}

FieldSeries integrate_rk4(const Rhs& rhs, const RateBound& rate, const Eigen::VectorXcd& y0, const GridSpec& grid,
                          int substeps, double t_start) {
  if (substeps < 1)
    throw PreconditionError("integrate_rk4: substeps must be >= 1");
  const double h = grid.dt() / substeps;
  FieldSeries out;
  out.reserve(static_cast<std::size_t>(grid.nt()));
  out.push_back(y0);
  Eigen::VectorXcd y = y0;
  const long steps = static_cast<long>(grid.nt() - 1) * substeps;
  for (long n = 0; n < steps; ++n) {
    const double t = t_start + static_cast<double>(n) * h;
    const double tm = t + 0.5 * h;
    const double te = t_start + static_cast<double>(n + 1) * h;
    if (rate) {
      const double cfl = h * std::max({rate(t), rate(tm), rate(te)});
      if (!(cfl <= 1.0))
        throw InstabilityError("time step violates the stability guard", t, cfl);
    }
    const Eigen::VectorXcd k1 = rhs(t, y);
    const Eigen::VectorXcd k2 = rhs(tm, y + (0.5 * h) * k1);
    const Eigen::VectorXcd k3 = rhs(tm, y + (0.5 * h) * k2);
    const Eigen::VectorXcd k4 = rhs(te, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!finite(y))
      throw InstabilityError("non-finite state", te, rate ? h * rate(te) : 0.0);
    if ((n + 1) % substeps == 0)
      out.push_back(y);
  }
  return out;
}

ScalarPropagator::ScalarPropagator(PropagatorConfig cfg, GridSpec grid, double t_start)
    : cfg_(std::move(cfg)), grid_(std::move(grid)), t_start_(t_start), op_(cfg_.lambda + cfg_.b_diag, grid_) {
  cfg_.validate(grid_, t_start_);
}

FieldSeries ScalarPropagator::run(const Field& theta, const Source* g) const {
  if (theta.size() != grid_.nx())
    throw DimensionError("propagator: data size does not match the grid");
  Rhs rhs = [this, g](double t, const Eigen::VectorXcd& w) -> Eigen::VectorXcd {
    Eigen::VectorXcd out = op_.apply(t, w);
    if (g)
      out += (*g)(t);
    return kI * out;
  };
  RateBound rate = [this](double t) { return op_.max_modulus(t); };
  return integrate_rk4(rhs, rate, theta, grid_, cfg_.substeps, t_start_);
}

FieldSeries ScalarPropagator::homogeneous(const Field& theta) const { return run(theta, nullptr); }

FieldSeries ScalarPropagator::inhomogeneous(const Source& g) const {
  return run(Field::Zero(grid_.nx()), &g);
}

FieldSeries ScalarPropagator::inhomogeneous(const FieldSeries& g) const {
  const Source src = interpolate_series(g, grid_, t_start_);
  return run(Field::Zero(grid_.nx()), &src);
}

FieldSeries ScalarPropagator::solve(const Field& theta, const Source& g) const { return run(theta, &g); }

FieldSeries solve_homogeneous(const PropagatorConfig& cfg, const Field& theta, const GridSpec& grid) {
  return ScalarPropagator(cfg, grid).homogeneous(theta);
}

FieldSeries solve_inhomogeneous(const PropagatorConfig& cfg, const FieldSeries& g, const GridSpec& grid) {
  return ScalarPropagator(cfg, grid).inhomogeneous(g);
}

FieldSeries solve_inhomogeneous(const PropagatorConfig& cfg, const Source& g, const GridSpec& grid) {
  return ScalarPropagator(cfg, grid).inhomogeneous(g);
}

Phase explicit_phase(const ScalarSymbol& lambda_xi, const GridSpec& grid, int substeps) {
  if (substeps < 1)
    throw PreconditionError("explicit_phase: substeps must be >= 1");
  if (lambda_xi.depends_on_x()) {
    const int nt = lambda_xi.depends_on_t() ? grid.nt() : 1;
    for (int n = 0; n < nt; ++n) {
      const Eigen::ArrayXXcd vals = lambda_xi.sample(grid.time(n), grid.points(), grid.frequencies());
      for (Eigen::Index k = 0; k < vals.cols(); ++k) {
        const double scale = std::max(1.0, vals.col(k).abs().maxCoeff());
        const double spread = (vals.col(k) - vals(0, k)).abs().maxCoeff();
        if (spread > 1e-12 * scale)
          throw NotXIndependent("explicit_phase: lambda varies in x by " + std::to_string(spread) + " at " +
                                to_string(Witness{grid.time(n), 0.0, grid.frequencies()(k)}));
      }
    }
  }
  const double h = grid.dt() / substeps;
  return Phase([lambda_xi, h](double t, double s, double xi) {
    const double span = t - s;
    if (span == 0.0)
      return 0.0;
    const long panels = 2 * std::max(1L, static_cast<long>(std::ceil(std::abs(span) / (2.0 * h) - 1e-9)));
    const double step = span / static_cast<double>(panels);
    auto f = [&](long j) { return lambda_xi(s + static_cast<double>(j) * step, 0.0, xi).real(); };
    double acc = f(0) + f(panels);
    for (long j = 1; j < panels; ++j)
      acc += (j % 2 == 1 ? 4.0 : 2.0) * f(j);
    return acc * step / 3.0;
  });
}

Field fio_apply(const Phase& phase, const ScalarSymbol& amp, double t, const Field& theta, const GridSpec& grid) {
  if (theta.size() != grid.nx())
    throw DimensionError("fio_apply: data size does not match the grid");
  const int nx = grid.nx();
  const Eigen::VectorXcd that = fft::forward(theta);
  Eigen::VectorXcd weighted(nx);
  for (int k = 0; k < nx; ++k)
    weighted(k) = std::polar(1.0, phase.increment(t, 0.0, grid.frequencies()(k))) * that(k);
  const Eigen::ArrayXXcd a = amp.sample(t, grid.points(), grid.frequencies());
  Field out(nx);
  for (int i = 0; i < nx; ++i) {
    Complex acc = 0.0;
    for (int k = 0; k < nx; ++k) {
      // x_i xi_k = 2 pi (i k mod nx) / nx exactly on the discrete torus.
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(i) * k) % nx) / nx;
      acc += std::polar(1.0, angle) * a(i, k) * weighted(k);
    }
    out(i) = acc / static_cast<double>(nx);
  }
  return out;
}

std::vector<int> dyadic_probe_indices(const GridSpec& grid) {
  std::vector<int> out{0};
  for (int k = 1; k < grid.nx() / 4; k *= 2) {
    out.push_back(k);
    out.push_back(grid.nx() - k);
  }
  return out;
}

SmallTimeBounds measure_small_time_bounds(const PropagatorConfig& cfg, const GridSpec& grid, double s) {
  const ScalarPropagator prop(cfg, grid);
  SmallTimeBounds out;
  for (int k : dyadic_probe_indices(grid)) {
    Field theta(grid.nx());
    for (int i = 0; i < grid.nx(); ++i)
      theta(i) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(i) * k) % grid.nx()) /
                                     grid.nx());
    const double base = sobolev_norm(theta, s, grid);
    const FieldSeries w0 = prop.homogeneous(theta);
    for (const Field& w : w0)
      out.C0 = std::max(out.C0, sobolev_norm(w, s, grid) / base);
    const FieldSeries w1 = prop.inhomogeneous([theta](double) { return theta; });
    for (int n = 1; n < grid.nt(); ++n)
      out.C1 = std::max(out.C1, sobolev_norm(w1[static_cast<std::size_t>(n)], s, grid) / (grid.time(n) * base));
  }
  return out;
}

} // namespace hypertri

#include "hypertri/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hypertri {

std::string to_string(const Witness& w) {
  std::ostringstream os;
  os.precision(6);
  os << "(t=" << w.t << ", x=" << w.x << ", xi=" << w.xi << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// GridSpec

GridSpec::GridSpec(double T_final, int nt, double L, int nx, double M)
    : T_final_(T_final), nt_(nt), L_(L), nx_(nx), M_(M) {
  if (nx < 4 || (nx & (nx - 1)) != 0)
    throw PreconditionError("grid: nx must be a power of two >= 4, got " + std::to_string(nx));
  if (nt < 2)
    throw PreconditionError("grid: nt must be >= 2, got " + std::to_string(nt));
  if (!(T_final > 0.0) || !std::isfinite(T_final))
    throw PreconditionError("grid: T_final must be positive and finite");
  if (!(L > 0.0) || !std::isfinite(L))
    throw PreconditionError("grid: L must be positive and finite");
  points_.resize(nx);
  frequencies_.resize(nx);
  for (int i = 0; i < nx; ++i) {
    points_(i) = point(i);
    frequencies_(i) = frequency(i);
  }
  if (!(M >= 0.0) || M >= max_frequency())
    throw PreconditionError("grid: cutoff M must satisfy 0 <= M < max|xi| = " + std::to_string(max_frequency()));
}

double GridSpec::frequency(int k) const noexcept {
  const double base = 2.0 * std::numbers::pi / L_;
  return k < nx_ / 2 ? base * k : base * (k - nx_);
}

double GridSpec::max_frequency() const noexcept { return 2.0 * std::numbers::pi / L_ * (nx_ / 2); }

Eigen::ArrayXd GridSpec::times() const {
  Eigen::ArrayXd ts(nt_);
  for (int n = 0; n < nt_; ++n)
    ts(n) = time(n);
  return ts;
}

std::vector<int> GridSpec::shell_indices() const {
  std::vector<int> out;
  for (int k = 0; k < nx_; ++k)
    if (std::abs(frequencies_(k)) >= M_)
      out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------
// ScalarSymbol

ScalarSymbol::ScalarSymbol(PointFn f, double order, Dependence dep)
    : impl_(std::make_shared<const Impl>(Impl{std::move(f), nullptr, order, dep})) {}

ScalarSymbol::ScalarSymbol(PointFn f, GridFn g, double order, Dependence dep)
    : impl_(std::make_shared<const Impl>(Impl{std::move(f), std::move(g), order, dep})) {}

Eigen::ArrayXXcd ScalarSymbol::sample(double t, const Eigen::ArrayXd& x, const Eigen::ArrayXd& xi) const {
  const Dependence& d = impl_->dep;
  if (!d.x && x.size() > 1) {
    Eigen::ArrayXd x0 = x.head(1);
    return sample(t, x0, xi).replicate(x.size(), 1);
  }
  if (!d.xi && xi.size() > 1) {
    Eigen::ArrayXd xi0 = xi.head(1);
    return sample(t, x, xi0).replicate(1, xi.size());
  }
  if (impl_->grid)
    return impl_->grid(t, x, xi);
  Eigen::ArrayXXcd out(x.size(), xi.size());
  for (Eigen::Index k = 0; k < xi.size(); ++k)
    for (Eigen::Index i = 0; i < x.size(); ++i)
      out(i, k) = impl_->point(t, x(i), xi(k));
  return out;
}

ScalarSymbol ScalarSymbol::with_order(double order) const {
  ScalarSymbol s = *this;
  s.impl_ = std::make_shared<const Impl>(Impl{impl_->point, impl_->grid, order, impl_->dep});
  return s;
}

namespace symbols {

namespace {
constexpr double kNoOrder = -std::numeric_limits<double>::infinity();
}

ScalarSymbol constant(Complex c) {
  return ScalarSymbol(
      [c](double, double, double) { return c; },
      [c](double, const Eigen::ArrayXd& x, const Eigen::ArrayXd& xi) {
        return Eigen::ArrayXXcd::Constant(x.size(), xi.size(), c);
      },
      c == Complex(0.0) ? kNoOrder : 0.0, Dependence{false, false, false});
}

ScalarSymbol zero() { return constant(0.0); }
ScalarSymbol one() { return constant(1.0); }

ScalarSymbol xi() {
  return ScalarSymbol(
      [](double, double, double k) { return Complex(k); },
      [](double, const Eigen::ArrayXd& x, const Eigen::ArrayXd& xi) {
        return Eigen::ArrayXXcd(xi.cast<Complex>().transpose().replicate(x.size(), 1));
      },
      1.0, Dependence{false, false, true});
}

ScalarSymbol bracket_power(double p) {
  return ScalarSymbol(
      [p](double, double, double k) { return Complex(std::pow(1.0 + k * k, 0.5 * p)); },
      [p](double, const Eigen::ArrayXd& x, const Eigen::ArrayXd& xi) {
        Eigen::ArrayXd row = (1.0 + xi.square()).pow(0.5 * p);
        return Eigen::ArrayXXcd(row.cast<Complex>().transpose().replicate(x.size(), 1));
      },
      p, Dependence{false, false, true});
}

ScalarSymbol t() {
  return ScalarSymbol(
      [](double tt, double, double) { return Complex(tt); },
      [](double tt, const Eigen::ArrayXd& x, const Eigen::ArrayXd& xi) {
        return Eigen::ArrayXXcd::Constant(x.size(), xi.size(), Complex(tt));
      },
      0.0, Dependence{true, false, false});
}

ScalarSymbol x() {
  return ScalarSymbol(
      [](double, double xx, double) { return Complex(xx); },
      [](double, const Eigen::ArrayXd& x, const Eigen::ArrayXd& xi) {
        return Eigen::ArrayXXcd(x.cast<Complex>().replicate(1, xi.size()));
      },
      0.0, Dependence{false, true, false});
}

ScalarSymbol of_x(std::function<Complex(double)> f) {
  return ScalarSymbol([f](double, double xx, double) { return f(xx); }, 0.0, Dependence{false, true, false});
}

ScalarSymbol of_t(std::function<Complex(double)> f) {
  return ScalarSymbol([f](double tt, double, double) { return f(tt); }, 0.0, Dependence{true, false, false});
}

namespace {

template <class PointOp, class ArrayOp>
ScalarSymbol unary(const ScalarSymbol& a, double order, PointOp pop, ArrayOp aop) {
  return ScalarSymbol(
      [a, pop](double t, double x, double xi) { return pop(a(t, x, xi)); },
      [a, aop](double t, const Eigen::ArrayXd& x, const Eigen::ArrayXd& xi) {
        return Eigen::ArrayXXcd(aop(a.sample(t, x, xi)));
      },
      order, a.dependence());
}

} // namespace

ScalarSymbol sin(const ScalarSymbol& a) {
  return unary(a, 0.0, [](Complex z) { return std::sin(z); }, [](const Eigen::ArrayXXcd& z) { return z.sin(); });
}

ScalarSymbol cos(const ScalarSymbol& a) {
  return unary(a, 0.0, [](Complex z) { return std::cos(z); }, [](const Eigen::ArrayXXcd& z) { return z.cos(); });
}

ScalarSymbol exp(const ScalarSymbol& a) {
  return unary(a, 0.0, [](Complex z) { return std::exp(z); }, [](const Eigen::ArrayXXcd& z) { return z.exp(); });
}

ScalarSymbol pow(const ScalarSymbol& a, double p) {
  auto op = [p](Complex z) { return std::pow(z, p); };
  return unary(a, p * a.order(), op, [op](const Eigen::ArrayXXcd& z) { return z.unaryExpr(op); });
}

ScalarSymbol conj(const ScalarSymbol& a) {
  return unary(a, a.order(), [](Complex z) { return std::conj(z); },
               [](const Eigen::ArrayXXcd& z) { return z.conjugate(); });
}

} // namespace symbols

namespace {

template <class Op>
ScalarSymbol binary(const ScalarSymbol& a, const ScalarSymbol& b, double order, Op op) {
  return ScalarSymbol(
      [a, b, op](double t, double x, double xi) { return op(a(t, x, xi), b(t, x, xi)); },
      [a, b, op](double t, const Eigen::ArrayXd& x, const Eigen::ArrayXd& xi) {
        return Eigen::ArrayXXcd(op(a.sample(t, x, xi), b.sample(t, x, xi)));
      },
      order, a.dependence() | b.dependence());
}

} // namespace

ScalarSymbol operator+(const ScalarSymbol& a, const ScalarSymbol& b) {
  return binary(a, b, std::max(a.order(), b.order()), [](const auto& u, const auto& v) { return u + v; });
}

ScalarSymbol operator-(const ScalarSymbol& a, const ScalarSymbol& b) {
  return binary(a, b, std::max(a.order(), b.order()), [](const auto& u, const auto& v) { return u - v; });
}

ScalarSymbol operator*(const ScalarSymbol& a, const ScalarSymbol& b) {
  return binary(a, b, a.order() + b.order(), [](const auto& u, const auto& v) { return u * v; });
}

ScalarSymbol operator/(const ScalarSymbol& a, const ScalarSymbol& b) {
  const double order = std::isinf(a.order()) && a.order() < 0 ? a.order() : a.order() - b.order();
  return binary(a, b, order, [](const auto& u, const auto& v) { return u / v; });
}

ScalarSymbol operator-(const ScalarSymbol& a) {
  return ScalarSymbol(
      [a](double t, double x, double xi) { return -a(t, x, xi); },
      [a](double t, const Eigen::ArrayXd& x, const Eigen::ArrayXd& xi) {
        return Eigen::ArrayXXcd(-a.sample(t, x, xi));
      },
      a.order(), a.dependence());
}

ScalarSymbol operator*(Complex c, const ScalarSymbol& a) { return symbols::constant(c) * a; }

// ---------------------------------------------------------------------------

Eigen::ArrayXXcd eval_grid(const ScalarSymbol& sym, const GridSpec& grid, double t) {
  if (!(t >= 0.0 && t <= grid.T_final() * (1.0 + 1e-12)))
    throw PreconditionError("eval_grid: t outside [0, T_final]");
  Eigen::ArrayXXcd out = sym.sample(t, grid.points(), grid.frequencies());
  for (Eigen::Index k = 0; k < out.cols(); ++k)
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      if (!std::isfinite(out(i, k).real()) || !std::isfinite(out(i, k).imag()))
        throw EvaluationError("non-finite symbol value", Witness{t, grid.points()(i), grid.frequencies()(k)});
  return out;
}

std::vector<double> dyadic_levels(double lo, double hi) {
  std::vector<double> out;
  for (double v = lo; v <= hi * (1.0 + 1e-12); v *= 2.0)
    out.push_back(v);
  return out;
}

double estimate_order(const ScalarSymbol& sym, const GridSpec& grid, std::span<const double> levels) {
  if (levels.size() < 3)
    throw PreconditionError("estimate_order: need at least 3 levels");
  const double floor_level = std::max(2.0 * grid.cutoff(), 2.0);
  for (double v : levels)
    if (v < floor_level)
      throw PreconditionError("estimate_order: level " + std::to_string(v) + " below max(2M, 2)");

  const auto n = static_cast<Eigen::Index>(levels.size());
  Eigen::ArrayXd probe(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    probe(i) = levels[i];
    probe(n + i) = -levels[i];
  }
  Eigen::ArrayXd sup = Eigen::ArrayXd::Zero(n);
  const int nt = sym.depends_on_t() ? grid.nt() : 1;
  for (int it = 0; it < nt; ++it) {
    const Eigen::ArrayXXd mod = sym.sample(grid.time(it), grid.points(), probe).abs();
    for (Eigen::Index i = 0; i < n; ++i)
      sup(i) = std::max({sup(i), mod.col(i).maxCoeff(), mod.col(n + i).maxCoeff()});
  }
  if ((sup == 0.0).all())
    return -std::numeric_limits<double>::infinity();

  const double tiny = std::numeric_limits<double>::min();
  Eigen::ArrayXd lx(n), ly(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    lx(i) = std::log(bracket(levels[i]));
    ly(i) = std::log(std::max(sup(i), tiny));
  }
  const double mx = lx.mean(), my = ly.mean();
  return ((lx - mx) * (ly - my)).sum() / (lx - mx).square().sum();
}

double estimate_order(const ScalarSymbol& sym, const GridSpec& grid) {
  std::vector<double> levels;
  const double floor_level = std::max(2.0 * grid.cutoff(), 2.0);
  for (double v : dyadic_levels(8.0, 512.0))
    if (v >= floor_level)
      levels.push_back(v);
  double v = levels.empty() ? floor_level : levels.back() * 2.0;
  while (levels.size() < 3) {
    levels.push_back(v);
    v *= 2.0;
  }
  return estimate_order(sym, grid, levels);
}

// ---------------------------------------------------------------------------
// MatrixSymbol

MatrixSymbol::MatrixSymbol(int dim, MatrixFn f, Eigen::MatrixXd orders)
    : dim_(dim), f_(std::make_shared<const MatrixFn>(std::move(f))), orders_(std::move(orders)) {
  if (dim < 1)
    throw DimensionError("matrix symbol: dimension must be positive");
  if (orders_.rows() != dim || orders_.cols() != dim)
    throw DimensionError("matrix symbol: order table has wrong shape");
}

MatrixSymbol MatrixSymbol::from_entries(int dim, const std::vector<ScalarSymbol>& row_major) {
  if (dim < 1 || row_major.size() != static_cast<std::size_t>(dim) * dim)
    throw DimensionError("matrix symbol: expected " + std::to_string(dim * dim) + " entries");
  auto entries = std::make_shared<const std::vector<ScalarSymbol>>(row_major);
  Eigen::MatrixXd orders(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      orders(i, j) = row_major[i * dim + j].order();
  MatrixSymbol out(
      dim,
      [entries, dim](double t, double x, double xi) {
        Eigen::MatrixXcd m(dim, dim);
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j)
            m(i, j) = (*entries)[i * dim + j](t, x, xi);
        return m;
      },
      orders);
  out.entries_ = entries;
  return out;
}

MatrixSymbol MatrixSymbol::identity(int dim) {
  std::vector<ScalarSymbol> e(dim * dim, symbols::zero());
  for (int i = 0; i < dim; ++i)
    e[i * dim + i] = symbols::one();
  return from_entries(dim, e);
}

MatrixSymbol MatrixSymbol::zero(int dim) {
  return from_entries(dim, std::vector<ScalarSymbol>(dim * dim, symbols::zero()));
}

MatrixSymbol MatrixSymbol::diagonal(const VectorSymbol& d) {
  const int dim = static_cast<int>(d.size());
  std::vector<ScalarSymbol> e(dim * dim, symbols::zero());
  for (int i = 0; i < dim; ++i)
    e[i * dim + i] = d[i];
  return from_entries(dim, e);
}

ScalarSymbol MatrixSymbol::entry(int i, int j) const {
  if (i < 0 || j < 0 || i >= dim_ || j >= dim_)
    throw DimensionError("matrix symbol: entry index out of range");
  if (entries_)
    return (*entries_)[i * dim_ + j];
  auto f = f_;
  return ScalarSymbol([f, i, j](double t, double x, double xi) { return (*f)(t, x, xi)(i, j); }, orders_(i, j));
}

MatrixSymbol MatrixSymbol::certify_upper_triangular(const GridSpec& grid, double tol) const {
  for (int n = 0; n < grid.nt(); ++n)
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < i; ++j) {
        const Eigen::ArrayXXd mod = entry(i, j).sample(grid.time(n), grid.points(), grid.frequencies()).abs();
        Eigen::Index r, c;
        const double worst = mod.maxCoeff(&r, &c);
        if (worst > tol)
          throw EvaluationError("entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                    ") below the diagonal does not vanish",
                                Witness{grid.time(n), grid.points()(r), grid.frequencies()(c)});
      }
  MatrixSymbol out = *this;
  out.upper_ = true;
  return out;
}

namespace {

void require_same_dim(const MatrixSymbol& a, const MatrixSymbol& b) {
  if (a.dim() != b.dim())
    throw DimensionError("matrix symbol: dimension mismatch " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
}

} // namespace

MatrixSymbol operator+(const MatrixSymbol& a, const MatrixSymbol& b) {
  require_same_dim(a, b);
  return MatrixSymbol(
      a.dim(), [a, b](double t, double x, double xi) -> Eigen::MatrixXcd { return a(t, x, xi) + b(t, x, xi); },
      a.orders().cwiseMax(b.orders()));
}

MatrixSymbol operator-(const MatrixSymbol& a, const MatrixSymbol& b) {
  require_same_dim(a, b);
  return MatrixSymbol(
      a.dim(), [a, b](double t, double x, double xi) -> Eigen::MatrixXcd { return a(t, x, xi) - b(t, x, xi); },
      a.orders().cwiseMax(b.orders()));
}

MatrixSymbol operator*(const MatrixSymbol& a, const MatrixSymbol& b) {
  require_same_dim(a, b);
  const int m = a.dim();
  Eigen::MatrixXd orders(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double o = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < m; ++k)
        o = std::max(o, a.order(i, k) + b.order(k, j));
      orders(i, j) = o;
    }
  return MatrixSymbol(
      m, [a, b](double t, double x, double xi) -> Eigen::MatrixXcd { return a(t, x, xi) * b(t, x, xi); }, orders);
}

MatrixSymbol operator*(Complex c, const MatrixSymbol& a) {
  Eigen::MatrixXd orders = a.orders();
  if (c == Complex(0.0))
    orders.setConstant(-std::numeric_limits<double>::infinity());
  return MatrixSymbol(
      a.dim(), [a, c](double t, double x, double xi) -> Eigen::MatrixXcd { return c * a(t, x, xi); }, orders);
}

MatrixSymbol operator*(const ScalarSymbol& s, const MatrixSymbol& a) {
  Eigen::MatrixXd orders = a.orders().array() + s.order();
  return MatrixSymbol(
      a.dim(), [a, s](double t, double x, double xi) -> Eigen::MatrixXcd { return s(t, x, xi) * a(t, x, xi); },
      orders);
}

VectorSymbol operator*(const MatrixSymbol& a, const VectorSymbol& v) {
  if (static_cast<int>(v.size()) != a.dim())
    throw DimensionError("matrix-vector symbol product: dimension mismatch");
  auto vec = std::make_shared<const VectorSymbol>(v);
  VectorSymbol out;
  for (int i = 0; i < a.dim(); ++i) {
    double o = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < a.dim(); ++k)
      o = std::max(o, a.order(i, k) + v[k].order());
    out.emplace_back(
        [a, vec, i](double t, double x, double xi) {
          return (a(t, x, xi).row(i) * evaluate(*vec, t, x, xi))(0, 0);
        },
        o);
  }
  return out;
}

Eigen::VectorXcd evaluate(const VectorSymbol& v, double t, double x, double xi) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = v[i](t, x, xi);
  return out;
}

} // namespace hypertri

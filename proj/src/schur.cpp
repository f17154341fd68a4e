#include "hypertri/schur.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace hypertri {

namespace {

using VectorFn = std::function<Eigen::VectorXcd(double t, double x, double xi)>;

ConditionRecord pick_pivot(const VectorFn& h, int dim, const GridSpec& grid, double eps_cond) {
  Eigen::ArrayXd mins = Eigen::ArrayXd::Constant(dim, std::numeric_limits<double>::infinity());
  std::vector<Witness> where(static_cast<std::size_t>(dim));
  double sup = 0.0;
  for_each_shell_node(grid, [&](double t, double x, double xi) {
    const Eigen::VectorXcd v = h(t, x, xi);
    for (int j = 0; j < dim; ++j) {
      const double a = std::abs(v(j));
      sup = std::max(sup, a);
      if (a < mins(j)) {
        mins(j) = a;
        where[static_cast<std::size_t>(j)] = Witness{t, x, xi};
      }
    }
  });
  for (int j = 0; j < dim; ++j)
    if (sup > 0.0 && mins(j) >= eps_cond * sup)
      return {j, mins(j), where[static_cast<std::size_t>(j)]};
  Eigen::Index best = 0;
  mins.maxCoeff(&best);
  throw ConditionFailure("no eigenvector component stays away from zero on the shell",
                         where[static_cast<std::size_t>(best)], mins(best));
}

void check_eigenpair(const MatrixSymbol& A, const ScalarSymbol& lambda, const VectorSymbol& h, const GridSpec& grid,
                     const SchurTolerances& tol, int step) {
  if (static_cast<int>(h.size()) != A.dim())
    throw DimensionError("eigenvector length " + std::to_string(h.size()) + " does not match dimension " +
                         std::to_string(A.dim()));
  double worst = 0.0, sup = 0.0;
  Witness at{};
  for_each_shell_node(grid, [&](double t, double x, double xi) {
    const Eigen::MatrixXcd a = A(t, x, xi);
    const Eigen::VectorXcd v = evaluate(h, t, x, xi);
    const double scale = std::max(1.0, a.cwiseAbs().rowwise().sum().maxCoeff() * v.cwiseAbs().maxCoeff());
    const double r = (a * v - lambda(t, x, xi) * v).cwiseAbs().maxCoeff() / scale;
    sup = std::max(sup, v.cwiseAbs().maxCoeff());
    if (!(r <= worst)) {
      worst = r;
      at = Witness{t, x, xi};
    }
  });
  if (!(worst <= tol.tol_eig))
    throw BadEigenpair("eigen-residual |A h - lambda h| above tolerance", at, worst, step);
  if (!(sup >= tol.eps_vec))
    throw BadEigenpair("eigenvector vanishes on the shell", Witness{}, sup, step);
}

Eigen::MatrixXcd embed(const Eigen::MatrixXcd& block, int m) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(m, m);
  const auto n = block.rows();
  out.bottomRightCorner(n, n) = block;
  return out;
}

// Shared state of the symbols returned by full_triangularise.
struct Core {
  MatrixSymbol A;
  VectorSymbol lambda;
  std::vector<VectorSymbol> h;
  std::vector<int> pivots;
  int m;

  std::vector<Eigen::VectorXcd> vectors(double t, double x, double xi, std::size_t count) const {
    std::vector<Eigen::VectorXcd> out;
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(evaluate(h[i], t, x, xi));
    return out;
  }

  /// Accumulated (T_1...T_s, T_s^{-1}...T_1^{-1}) over the first s steps.
  std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> transforms(double t, double x, double xi, std::size_t s) const {
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Identity(m, m), Tinv = T;
    const std::vector<Eigen::VectorXcd> hv = vectors(t, x, xi, s);
    for (std::size_t k = 0; k < s; ++k) {
      const int rest = m - static_cast<int>(k);
      const Eigen::VectorXcd v = (Tinv * hv[k]).tail(rest);
      const auto [S, Sinv] = schur_step_matrices(v, pivots[k]);
      T = T * embed(S, m);
      Tinv = embed(Sinv, m) * Tinv;
    }
    return {T, Tinv};
  }
};

Eigen::MatrixXd constant_orders(int m, double value) { return Eigen::MatrixXd::Constant(m, m, value); }

} // namespace

ConditionRecord check_condition(const VectorSymbol& hred, const GridSpec& grid, double eps_cond) {
  if (hred.empty())
    throw DimensionError("check_condition: empty vector");
  return pick_pivot([&](double t, double x, double xi) { return evaluate(hred, t, x, xi); },
                    static_cast<int>(hred.size()), grid, eps_cond);
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> schur_step_matrices(const Eigen::VectorXcd& v, int pivot) {
  const auto n = v.size();
  if (pivot < 0 || pivot >= n)
    throw DimensionError("schur step: pivot out of range");
  Eigen::VectorXcd w = v;
  std::swap(w(0), w(pivot));
  const Eigen::VectorXcd mu = w / w(0);
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(n, n);
  S.col(0) = mu;
  S.row(0).swap(S.row(pivot));
  Eigen::MatrixXcd Sinv = Eigen::MatrixXcd::Identity(n, n);
  Sinv.col(0).tail(n - 1) = -mu.tail(n - 1);
  Sinv.col(0).swap(Sinv.col(pivot));
  return {S, Sinv};
}

SchurStep schur_step(const MatrixSymbol& A, const ScalarSymbol& lambda, const VectorSymbol& h, const GridSpec& grid,
                     const SchurTolerances& tol) {
  const int m = A.dim();
  check_eigenpair(A, lambda, h, grid, tol, 0);
  if (m == 1)
    return {MatrixSymbol::identity(1), MatrixSymbol::identity(1), std::nullopt, ConditionRecord{}};
  const ConditionRecord cond = check_condition(h, grid, tol.eps_cond);
  const int j = cond.pivot;
  const auto hv = std::make_shared<const VectorSymbol>(h);
  MatrixSymbol T(
      m, [hv, j](double t, double x, double xi) { return schur_step_matrices(evaluate(*hv, t, x, xi), j).first; },
      constant_orders(m, 0.0));
  MatrixSymbol Tinv(
      m, [hv, j](double t, double x, double xi) { return schur_step_matrices(evaluate(*hv, t, x, xi), j).second; },
      constant_orders(m, 0.0));
  MatrixSymbol E(
      m - 1,
      [A, hv, j, m](double t, double x, double xi) -> Eigen::MatrixXcd {
        const auto [S, Sinv] = schur_step_matrices(evaluate(*hv, t, x, xi), j);
        return (Sinv * A(t, x, xi) * S).bottomRightCorner(m - 1, m - 1);
      },
      A.orders().bottomRightCorner(m - 1, m - 1));
  return {T, Tinv, E, cond};
}

VectorSymbol reduced_eigenvector(const VectorSymbol& h_k,
                                 const std::vector<std::pair<MatrixSymbol, MatrixSymbol>>& steps, int k) {
  if (k < 1 || static_cast<int>(steps.size()) != k - 1)
    throw DimensionError("reduced_eigenvector: expected " + std::to_string(k - 1) + " steps");
  const int m = static_cast<int>(h_k.size());
  if (k > m)
    throw DimensionError("reduced_eigenvector: step index exceeds the dimension");
  for (const auto& s : steps)
    if (s.second.dim() != m)
      throw DimensionError("reduced_eigenvector: step dimension mismatch");
  const auto hv = std::make_shared<const VectorSymbol>(h_k);
  const auto st = std::make_shared<const std::vector<std::pair<MatrixSymbol, MatrixSymbol>>>(steps);
  auto full = [hv, st](double t, double x, double xi) {
    Eigen::VectorXcd v = evaluate(*hv, t, x, xi);
    for (const auto& s : *st)
      v = s.second(t, x, xi) * v;
    return v;
  };
  VectorSymbol out;
  for (int i = k - 1; i < m; ++i)
    out.emplace_back([full, i](double t, double x, double xi) { return full(t, x, xi)(i); }, 0.0);
  return out;
}

PointTriangularisation triangularise_point(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& lambda,
                                           const std::vector<Eigen::VectorXcd>& h, const std::vector<int>& pivots) {
  const auto m = A.rows();
  PointTriangularisation out;
  out.T = Eigen::MatrixXcd::Identity(m, m);
  out.Tinv = out.T;
  for (std::size_t k = 0; k + 1 < static_cast<std::size_t>(m); ++k) {
    const Eigen::VectorXcd v = (out.Tinv * h[k]).tail(m - static_cast<Eigen::Index>(k));
    const auto [S, Sinv] = schur_step_matrices(v, pivots[k]);
    out.T = out.T * embed(S, static_cast<int>(m));
    out.Tinv = embed(Sinv, static_cast<int>(m)) * out.Tinv;
  }
  out.lambda = lambda;
  out.N = (out.Tinv * A * out.T).triangularView<Eigen::StrictlyUpper>();
  return out;
}

TriangularResult full_triangularise(const MatrixSymbol& A, const EigenData& eig, const GridSpec& grid,
                                    const SchurTolerances& tol) {
  const int m = A.dim();
  VectorSymbol lambda = eig.eigenvalues;
  if (static_cast<int>(lambda.size()) == m - 1 && m > 1) {
    ScalarSymbol rest = A.entry(0, 0);
    for (int i = 1; i < m; ++i)
      rest = rest + A.entry(i, i);
    for (const auto& l : lambda)
      rest = rest - l;
    lambda.push_back(rest.with_order(1.0));
  }
  if (static_cast<int>(lambda.size()) != m)
    throw DimensionError("full_triangularise: expected " + std::to_string(m) + " eigenvalues");
  if (static_cast<int>(eig.eigenvectors.size()) < m - 1)
    throw DimensionError("full_triangularise: expected " + std::to_string(m - 1) + " eigenvectors");

  for (int i = 0; i + 1 < m; ++i)
    check_eigenpair(A, lambda[i], eig.eigenvectors[i], grid, tol, i + 1);

  auto core = std::make_shared<Core>(
      Core{A, lambda, std::vector<VectorSymbol>(eig.eigenvectors.begin(), eig.eigenvectors.begin() + (m - 1)), {}, m});

  TriangularResult res{MatrixSymbol::identity(m), MatrixSymbol::identity(m), lambda, MatrixSymbol::zero(m), {}, {}, {}};
  for (int k = 0; k + 1 < m; ++k) {
    const auto view = std::const_pointer_cast<const Core>(core);
    const std::size_t done = static_cast<std::size_t>(k);
    VectorFn hred = [view, done, k](double t, double x, double xi) -> Eigen::VectorXcd {
      const Eigen::MatrixXcd Tinv = view->transforms(t, x, xi, done).second;
      return (Tinv * evaluate(view->h[done], t, x, xi)).tail(view->m - k);
    };
    ConditionRecord cond;
    try {
      cond = pick_pivot(hred, m - k, grid, tol.eps_cond);
    } catch (const ConditionFailure& e) {
      throw ConditionFailure("reduced eigenvector h^(" + std::to_string(k + 1) + ") has no admissible pivot", e.where(),
                             e.min_modulus(), k + 1);
    }
    core->pivots.push_back(cond.pivot);
    res.conditions.push_back(cond);
    res.permutations.emplace_back(k, k + cond.pivot);

    const std::vector<int> pivots = core->pivots;
    auto factor = [view, k, pivots](double t, double x, double xi, bool inverse) -> Eigen::MatrixXcd {
      const std::size_t upto = static_cast<std::size_t>(k);
      const Eigen::MatrixXcd Tinv = view->transforms(t, x, xi, upto).second;
      const Eigen::VectorXcd v = (Tinv * evaluate(view->h[upto], t, x, xi)).tail(view->m - k);
      const auto [S, Sinv] = schur_step_matrices(v, pivots[upto]);
      return embed(inverse ? Sinv : S, view->m);
    };
    res.factors.emplace_back(
        MatrixSymbol(m, [factor](double t, double x, double xi) { return factor(t, x, xi, false); },
                     constant_orders(m, 0.0)),
        MatrixSymbol(m, [factor](double t, double x, double xi) { return factor(t, x, xi, true); },
                     constant_orders(m, 0.0)));
  }

  const auto view = std::const_pointer_cast<const Core>(core);
  const std::size_t steps = static_cast<std::size_t>(m - 1);
  res.T = MatrixSymbol(
      m, [view, steps](double t, double x, double xi) { return view->transforms(t, x, xi, steps).first; },
      constant_orders(m, 0.0));
  res.Tinv = MatrixSymbol(
      m, [view, steps](double t, double x, double xi) { return view->transforms(t, x, xi, steps).second; },
      constant_orders(m, 0.0));
  Eigen::MatrixXd n_orders = constant_orders(m, -std::numeric_limits<double>::infinity());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      n_orders(i, j) = 1.0;
  res.N = MatrixSymbol(
      m,
      [view, steps](double t, double x, double xi) -> Eigen::MatrixXcd {
        const auto [T, Tinv] = view->transforms(t, x, xi, steps);
        return (Tinv * view->A(t, x, xi) * T).triangularView<Eigen::StrictlyUpper>();
      },
      n_orders);
  return res;
}

std::vector<std::pair<std::string, double>> VerificationReport::fields() const {
  return {{"residual_total", residual_total},         {"residual_below_diag", residual_below_diag},
          {"residual_inverse", residual_inverse},     {"diag_deviation_max", diag_deviation_max},
          {"order_T_max", order_T_max},               {"order_N_max", order_N_max}};
}

VerificationReport verify_triangular(const MatrixSymbol& A, const TriangularResult& res, const GridSpec& grid,
                                     const EigenData* eig) {
  const int m = A.dim();
  if (res.T.dim() != m || res.Tinv.dim() != m || res.N.dim() != m || static_cast<int>(res.Lambda.size()) != m)
    throw DimensionError("verify_triangular: dimension mismatch");
  VectorSymbol reference = res.Lambda;
  if (eig) {
    for (std::size_t i = 0; i < eig->eigenvalues.size() && i < reference.size(); ++i)
      reference[i] = eig->eigenvalues[i];
  }
  VerificationReport rep;
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(m, m);
  for_each_shell_node(grid, [&](double t, double x, double xi) {
    const Eigen::MatrixXcd T = res.T(t, x, xi), Tinv = res.Tinv(t, x, xi);
    const Eigen::MatrixXcd M = Tinv * A(t, x, xi) * T;
    const Eigen::VectorXcd lam = evaluate(res.Lambda, t, x, xi);
    const Eigen::VectorXcd ref = evaluate(reference, t, x, xi);
    Eigen::MatrixXcd target = res.N(t, x, xi);
    target.diagonal() += lam;
    rep.residual_total = std::max(rep.residual_total, (M - target).cwiseAbs().maxCoeff());
    for (int i = 1; i < m; ++i)
      for (int j = 0; j < i; ++j)
        rep.residual_below_diag = std::max(rep.residual_below_diag, std::abs(M(i, j)));
    rep.residual_inverse = std::max(rep.residual_inverse, (Tinv * T - I).cwiseAbs().maxCoeff());
    rep.diag_deviation_max = std::max(rep.diag_deviation_max, (M.diagonal() - ref).cwiseAbs().maxCoeff());
  });
  rep.order_T_max = -std::numeric_limits<double>::infinity();
  rep.order_N_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      rep.order_T_max = std::max(rep.order_T_max, estimate_order(res.T.entry(i, j), grid));
      if (j > i)
        rep.order_N_max = std::max(rep.order_N_max, estimate_order(res.N.entry(i, j), grid));
    }
  return rep;
}

} // namespace hypertri

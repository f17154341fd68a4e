#include "hypertri/eigendata.hpp"

#include "hypertri/fft.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

namespace hypertri {

namespace {

// Samples of one scalar field on (shell frequency q, time level n, point i).
struct NodeField {
  int nq, nt, nx;
  std::vector<Complex> values;
  // Fourier coefficients in x per (q, n), filled by finalize().
  std::vector<Complex> coeffs;

  NodeField(int q, int t, int x) : nq(q), nt(t), nx(x), values(static_cast<std::size_t>(q) * t * x) {}

  std::size_t index(int q, int n, int i) const {
    return (static_cast<std::size_t>(q) * nt + static_cast<std::size_t>(n)) * nx + static_cast<std::size_t>(i);
  }
  Complex& at(int q, int n, int i) { return values[index(q, n, i)]; }

  void finalize() {
    coeffs.resize(values.size());
    Eigen::VectorXcd row(nx);
    for (int q = 0; q < nq; ++q)
      for (int n = 0; n < nt; ++n) {
        for (int i = 0; i < nx; ++i)
          row(i) = values[index(q, n, i)];
        const Eigen::VectorXcd c = fft::forward(row);
        for (int i = 0; i < nx; ++i)
          coeffs[index(q, n, i)] = c(i);
      }
  }
};

struct Interpolator {
  std::shared_ptr<const GridSpec> grid;
  std::shared_ptr<const std::vector<double>> shell_xi;

  int nearest_shell(double xi) const {
    const auto& s = *shell_xi;
    const auto it = std::lower_bound(s.begin(), s.end(), xi);
    if (it == s.begin())
      return 0;
    if (it == s.end())
      return static_cast<int>(s.size()) - 1;
    const auto prev = it - 1;
    return static_cast<int>((xi - *prev <= *it - xi) ? prev - s.begin() : it - s.begin());
  }

  Complex in_x(const NodeField& f, int q, int n, double x) const {
    const double pos = x / grid->length() * grid->nx();
    const double r = std::round(pos);
    if (std::abs(pos - r) < 1e-12) {
      const int i = ((static_cast<int>(r) % grid->nx()) + grid->nx()) % grid->nx();
      return f.values[f.index(q, n, i)];
    }
    Complex acc = 0.0;
    for (int k = 0; k < grid->nx(); ++k)
      acc += f.coeffs[f.index(q, n, k)] * std::polar(1.0, grid->frequency(k) * x);
    return acc / static_cast<double>(grid->nx());
  }

  Complex operator()(const NodeField& f, double t, double x, double xi) const {
    const int q = nearest_shell(xi);
    const double pos = std::clamp(t / grid->dt(), 0.0, static_cast<double>(grid->nt() - 1));
    const int n0 = std::min(static_cast<int>(std::floor(pos)), grid->nt() - 2);
    const double w = pos - n0;
    const Complex a = in_x(f, q, n0, x);
    if (w == 0.0)
      return a;
    const Complex b = in_x(f, q, n0 + 1, x);
    return w == 1.0 ? b : (1.0 - w) * a + w * b;
  }
};

Eigen::VectorXcd normalise(const Eigen::VectorXcd& v) {
  const double top = v.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (std::abs(v(j)) >= (1.0 - 1e-12) * top)
      return v / v(j);
  return v;
}

} // namespace

EigenData numeric_eigendata(const MatrixSymbol& A, const GridSpec& grid, const EigendataOptions& opt) {
  const int m = A.dim();
  std::vector<int> shell = grid.shell_indices();
  std::sort(shell.begin(), shell.end(), [&](int a, int b) { return grid.frequency(a) < grid.frequency(b); });
  const int nq = static_cast<int>(shell.size()), nt = grid.nt(), nx = grid.nx();

  std::vector<NodeField> lam(static_cast<std::size_t>(m), NodeField(nq, nt, nx));
  std::vector<NodeField> vec(static_cast<std::size_t>(m * m), NodeField(nq, nt, nx));

  std::vector<int> perm(static_cast<std::size_t>(m));
  Eigen::VectorXcd prev_val;
  Eigen::MatrixXcd prev_vec;
  bool first = true;
  long collisions = 0;
  Witness first_collision{};
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver;

  for (int qq = 0; qq < nq; ++qq) {
    const double xi = grid.frequency(shell[static_cast<std::size_t>(qq)]);
    for (int nn = 0; nn < nt; ++nn) {
      const int n = qq % 2 == 0 ? nn : nt - 1 - nn;
      for (int ii = 0; ii < nx; ++ii) {
        const int i = (qq * nt + nn) % 2 == 0 ? ii : nx - 1 - ii;
        const double t = grid.time(n), x = grid.point(i);
        solver.compute(A(t, x, xi));
        const Eigen::VectorXcd val = solver.eigenvalues();
        Eigen::MatrixXcd vecs(m, m);
        for (int c = 0; c < m; ++c)
          vecs.col(c) = normalise(solver.eigenvectors().col(c));

        const double scale = std::max(1.0, val.cwiseAbs().maxCoeff());
        bool colliding = false;
        for (int a = 0; a < m; ++a)
          for (int b = a + 1; b < m; ++b)
            colliding = colliding || std::abs(val(a) - val(b)) < opt.delta_sep * scale;
        if (colliding && collisions++ == 0)
          first_collision = Witness{t, x, xi};

        std::iota(perm.begin(), perm.end(), 0);
        if (first) {
          std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return val(a).real() < val(b).real(); });
          first = false;
        } else {
          struct Candidate {
            double cost, overlap;
            std::vector<int> p;
          };
          std::vector<Candidate> cands;
          std::vector<int> p(perm);
          do {
            double cost = 0.0, overlap = 0.0;
            for (int a = 0; a < m; ++a) {
              cost += std::norm(val(p[a]) - prev_val(a));
              overlap += std::abs(prev_vec.col(a).normalized().dot(vecs.col(p[a]).normalized()));
            }
            cands.push_back({cost, overlap, p});
          } while (std::next_permutation(p.begin(), p.end()));
          std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
          const double tie = opt.delta_sep * scale;
          // Costs are sums of squared distances; ties and ambiguity are judged on their square roots.
          const double best_cost = std::sqrt(cands[0].cost);
          const double second = cands.size() > 1 ? std::sqrt(cands[1].cost) : std::numeric_limits<double>::infinity();
          std::vector<int> best = cands[0].p;
          if (colliding) {
            double best_overlap = cands[0].overlap;
            for (const auto& c : cands)
              if (std::sqrt(c.cost) <= best_cost + tie && c.overlap > best_overlap) {
                best_overlap = c.overlap;
                best = c.p;
              }
          }
          bool prev_separated = true;
          const double prev_scale = std::max(1.0, prev_val.cwiseAbs().maxCoeff());
          for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b)
              prev_separated = prev_separated && std::abs(prev_val(a) - prev_val(b)) >= opt.delta_sep * prev_scale;
          if (!colliding && prev_separated && m > 1 && second - best_cost < opt.delta_sep * scale)
            throw ContinuationError("ambiguous eigenvalue matching at " + to_string(Witness{t, x, xi}));
          perm = best;
        }

        prev_val.resize(m);
        prev_vec.resize(m, m);
        for (int a = 0; a < m; ++a) {
          prev_val(a) = val(perm[a]);
          prev_vec.col(a) = vecs.col(perm[a]);
          lam[static_cast<std::size_t>(a)].at(qq, n, i) = prev_val(a);
          for (int r = 0; r < m; ++r)
            vec[static_cast<std::size_t>(a * m + r)].at(qq, n, i) = prev_vec(r, a);
        }
      }
    }
  }

  for (auto& f : lam)
    f.finalize();
  for (auto& f : vec)
    f.finalize();

  auto shell_xi = std::make_shared<std::vector<double>>();
  for (int k : shell)
    shell_xi->push_back(grid.frequency(k));
  const Interpolator interp{std::make_shared<const GridSpec>(grid), shell_xi};
  auto lam_store = std::make_shared<const std::vector<NodeField>>(std::move(lam));
  auto vec_store = std::make_shared<const std::vector<NodeField>>(std::move(vec));

  EigenData out;
  for (int a = 0; a < m; ++a)
    out.eigenvalues.emplace_back(
        [interp, lam_store, a](double t, double x, double xi) {
          return interp((*lam_store)[static_cast<std::size_t>(a)], t, x, xi);
        },
        1.0);
  for (int a = 0; a + 1 < m; ++a) {
    VectorSymbol h;
    for (int r = 0; r < m; ++r)
      h.emplace_back(
          [interp, vec_store, a, r, m](double t, double x, double xi) {
            return interp((*vec_store)[static_cast<std::size_t>(a * m + r)], t, x, xi);
          },
          0.0);
    out.eigenvectors.push_back(std::move(h));
  }
  if (collisions > 0) {
    std::ostringstream os;
    os << "multiplicity: eigenvalues collide at " << collisions << " node(s), first at " << to_string(first_collision);
    out.warnings.push_back(os.str());
  }
  return out;
}

} // namespace hypertri

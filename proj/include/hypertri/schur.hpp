#ifndef HYPERTRI_SCHUR_HPP
#define HYPERTRI_SCHUR_HPP

#include "hypertri/symbol.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hypertri {

struct SchurTolerances {
  /// Pivot threshold, relative to the sup-norm of the reduced eigenvector over the shell.
  double eps_cond = 1e-6;
  /// Eigenpair residual bound, relative to max(1, |A| |h|) at each node.
  double tol_eig = 1e-8;
  double tol_tri = 1e-9;
  /// Lower bound on the sup-norm of every supplied eigenvector.
  double eps_vec = 1e-12;
};

/// Eigenvalues (m of them, or m - 1 with the last recovered from the trace) and
/// the eigenvectors h_1 ... h_{m-1}, in the order the triangular form must follow.
struct EigenData {
  VectorSymbol eigenvalues;
  std::vector<VectorSymbol> eigenvectors;
  /// Non-fatal notes from numeric construction (eigenvalue collisions).
  std::vector<std::string> warnings;
};

/// Visits (t, x, xi) over every time level, every point and the shell |xi| >= M.
template <class F>
void for_each_shell_node(const GridSpec& grid, F&& f) {
  const std::vector<int> shell = grid.shell_indices();
  for (int n = 0; n < grid.nt(); ++n)
    for (int i = 0; i < grid.nx(); ++i)
      for (int k : shell)
        f(grid.time(n), grid.point(i), grid.frequency(k));
}

/// Result of the pivot search over the shell.
struct ConditionRecord {
  /// Zero-based component of the reduced eigenvector used as pivot.
  int pivot = 0;
  /// min over the shell of |<h | e_pivot>|.
  double min_modulus = 0.0;
  /// Where that minimum is attained.
  Witness where;
};

/// Smallest j with min_shell |h_j| >= eps_cond * sup_shell |h|.
/// Throws ConditionFailure (witness at the best component's minimum) when none qualifies.
ConditionRecord check_condition(const VectorSymbol& hred, const GridSpec& grid, double eps_cond = 1e-6);

/// Pointwise Schur step matrices for an eigenvector v and pivot j:
/// T = P (I + (mu - e_1) e_1^T) with P swapping 1 and j and mu = P v / v_j, and its closed-form inverse.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> schur_step_matrices(const Eigen::VectorXcd& v, int pivot);

struct SchurStep {
  MatrixSymbol T;
  MatrixSymbol Tinv;
  /// Lower-right (m-1) x (m-1) block of Tinv A T; empty for m = 1.
  std::optional<MatrixSymbol> E;
  ConditionRecord condition;
};

/// One reduction step for the eigenpair (lambda, h) of A.
/// Throws BadEigenpair when the eigen-residual exceeds tol_eig, ConditionFailure when no pivot qualifies.
SchurStep schur_step(const MatrixSymbol& A, const ScalarSymbol& lambda, const VectorSymbol& h, const GridSpec& grid,
                     const SchurTolerances& tol = {});

/// h^(k) = Pi_{k-1} T_{k-1}^{-1} ... T_1^{-1} h_k for one-based k, where steps holds (T_i, T_i^{-1}), i < k.
VectorSymbol reduced_eigenvector(const VectorSymbol& h_k,
                                 const std::vector<std::pair<MatrixSymbol, MatrixSymbol>>& steps, int k);

struct TriangularResult {
  MatrixSymbol T;
  MatrixSymbol Tinv;
  VectorSymbol Lambda;
  /// Strictly upper part of Tinv A T.
  MatrixSymbol N;
  /// Embedded step factors (T_k, T_k^{-1}); T = T_1 ... T_{m-1}.
  std::vector<std::pair<MatrixSymbol, MatrixSymbol>> factors;
  /// Zero-based (k, k + pivot) row swap applied inside factor k.
  std::vector<std::pair<int, int>> permutations;
  std::vector<ConditionRecord> conditions;
};

/// Pointwise triangularisation with fixed pivots; the numeric core behind the symbols in TriangularResult.
struct PointTriangularisation {
  Eigen::MatrixXcd T;
  Eigen::MatrixXcd Tinv;
  Eigen::VectorXcd lambda;
  Eigen::MatrixXcd N;
};
PointTriangularisation triangularise_point(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& lambda,
                                           const std::vector<Eigen::VectorXcd>& h, const std::vector<int>& pivots);

/// Iterated Schur reduction T^{-1} A T = Lambda + N.
/// ConditionFailure and BadEigenpair carry the one-based step index.
TriangularResult full_triangularise(const MatrixSymbol& A, const EigenData& eig, const GridSpec& grid,
                                    const SchurTolerances& tol = {});

struct VerificationReport {
  double residual_total = 0.0;
  double residual_below_diag = 0.0;
  double residual_inverse = 0.0;
  double diag_deviation_max = 0.0;
  double order_T_max = 0.0;
  double order_N_max = 0.0;

  /// Key/value pairs in the serialised order.
  std::vector<std::pair<std::string, double>> fields() const;
  bool passes(double tol_tri) const {
    return residual_total < tol_tri && residual_below_diag < tol_tri && residual_inverse < tol_tri;
  }
};

/// Audits res against A on the shell. Report-only; never throws on bad residuals.
/// Diagonal deviation is measured against eig when given, otherwise against res.Lambda.
VerificationReport verify_triangular(const MatrixSymbol& A, const TriangularResult& res, const GridSpec& grid,
                                     const EigenData* eig = nullptr);

} // namespace hypertri

#endif

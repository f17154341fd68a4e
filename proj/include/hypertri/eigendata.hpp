#ifndef HYPERTRI_EIGENDATA_HPP
#define HYPERTRI_EIGENDATA_HPP

#include "hypertri/schur.hpp"

namespace hypertri {

struct EigendataOptions {
  /// Eigenvalues closer than delta_sep * max(1, |lambda|) count as colliding.
  double delta_sep = 1e-6;
};

/// Eigen-decomposition at every shell node with continuation matching.
///
/// Nodes are visited with xi ascending over the shell and a snake over (t, x)
/// inside each frequency, so consecutive nodes are neighbours. The first node
/// is sorted by real part; afterwards the permutation minimising the summed
/// squared eigenvalue distance to the previous node is chosen. Colliding eigenvalues
/// are matched by eigenvector overlap and reported in `warnings`. An ambiguous
/// match between separated eigenvalues throws ContinuationError.
///
/// Every eigenvector is scaled so its largest-modulus component (lowest index
/// on ties) equals 1. The returned symbols interpolate piecewise-linearly in t,
/// by trigonometric interpolation in x and by the nearest shell frequency in xi.
/// All m eigenvalues are returned together with the first m - 1 eigenvectors.
EigenData numeric_eigendata(const MatrixSymbol& A, const GridSpec& grid, const EigendataOptions& opt = {});

} // namespace hypertri

#endif

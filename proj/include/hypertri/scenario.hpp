#ifndef HYPERTRI_SCENARIO_HPP
#define HYPERTRI_SCENARIO_HPP

#include "hypertri/cascade.hpp"
#include "hypertri/schur.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hypertri {

using DataFn = std::function<Complex(double t, double x)>;

/// A parsed scenario file.
///
/// Keys: m, T_final, nt, nx (required); s, L, M, substeps, seed (optional);
/// symbols {lambda, N, B} for a system in triangular form and/or
/// symbols {A, eigenvalues, eigenvectors} for a full principal part; u0 and f
/// as lists of data expressions; flags {override_levi}; tolerances
/// {eps_cond, tol_eig, tol_tri}. Matrices are lists of
/// rows. Numbers may be given as JSON numbers or constant expressions.
struct Scenario {
  std::string name;
  /// File content, copied verbatim into output directories.
  std::string text;
  int m = 0;
  double s = 0.0;
  GridSpec grid{1.0, 2, 1.0, 4, 0.0};
  int substeps = 1;
  std::uint64_t seed = 0;
  bool override_levi = false;
  SchurTolerances tolerances;

  std::optional<MatrixSymbol> A;
  std::optional<EigenData> eigendata;
  std::optional<VectorSymbol> lambda;
  MatrixSymbol N = MatrixSymbol::zero(1);
  MatrixSymbol B = MatrixSymbol::zero(1);
  std::vector<DataFn> u0;
  std::vector<DataFn> f;
  /// Declared orders that the numerical estimate exceeds.
  std::vector<std::string> warnings;

  /// The system in triangular form; throws ParseError without symbols.lambda.
  SystemSpec system() const;
};

/// Throws ParseError on malformed JSON, schema violations or bad expressions.
Scenario parse_scenario(const std::string& text, const std::string& name = "scenario");
/// Throws MissingFile when the path cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

/// Samples data expressions at time t.
StateVector sample_state(const std::vector<DataFn>& fns, double t, double s, const GridSpec& grid);

} // namespace hypertri

#endif

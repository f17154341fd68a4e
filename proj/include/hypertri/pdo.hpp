#ifndef HYPERTRI_PDO_HPP
#define HYPERTRI_PDO_HPP

#include "hypertri/symbol.hpp"

#include <iosfwd>
#include <limits>
#include <unordered_map>
#include <memory>
#include <string>
#include <vector>

namespace hypertri {

/// Samples of a complex function on the spatial grid.
using Field = Eigen::VectorXcd;
/// A field at a sequence of time levels.
using FieldSeries = std::vector<Field>;

/// m fields, component k (zero-based) measured in H^(s + k).
struct StateVector {
  std::vector<Field> components;
  double sobolev_base = 0.0;

  int size() const noexcept { return static_cast<int>(components.size()); }
  double component_index(int k) const noexcept { return sobolev_base + k; }
};

/// Operator a(t, x, D) on grid functions by left quantisation:
///   (a(t,x,D)u)(x_i) = 1/nx * sum_k exp(i x_i xi_k) a(t, x_i, xi_k) uhat_k.
///
/// Symbols that do not read xi act as multiplication operators and symbols
/// that do not read x act as Fourier multipliers; both paths are exact
/// specialisations of the sum above. Evaluated tables are memoised per time
/// level up to `memo_bytes`, so one instance must not be shared between threads.
class QuantizedSymbol {
public:
  QuantizedSymbol(ScalarSymbol a, const GridSpec& grid, std::size_t memo_bytes = std::size_t{32} << 20);

  Field apply(double t, const Field& u) const;
  /// max over the grid of |a(t, x_i, xi_k)|.
  double max_modulus(double t) const;
  const ScalarSymbol& symbol() const noexcept { return a_; }

private:
  enum class Kind { Constant, Multiplication, FourierMultiplier, General };
  struct Table {
    Eigen::MatrixXcd values;
    double max_modulus = 0.0;
  };

  const Table& table(double t) const;

  ScalarSymbol a_;
  Eigen::ArrayXd x_;
  Eigen::ArrayXd xi_;
  Kind kind_;
  std::shared_ptr<const Eigen::MatrixXcd> phases_;
  std::size_t memo_limit_;
  mutable std::size_t memo_bytes_ = 0;
  mutable std::unordered_map<double, Table> memo_;
  mutable Table scratch_;
  mutable double scratch_t_ = std::numeric_limits<double>::quiet_NaN();
};

/// One-off application of a(t, x, D) to u.
Field apply_symbol(const ScalarSymbol& a, double t, const Field& u, const GridSpec& grid);

/// Discrete H^s norm (sum_k <xi_k>^(2s) |uhat_k|^2)^(1/2) with the unnormalised forward DFT.
double sobolev_norm(const Field& u, double s, const GridSpec& grid);

/// sup over the series of the H^s norm.
double sup_sobolev_norm(const FieldSeries& u, double s, const GridSpec& grid);

/// Per-component norms ||u_k||_{H^{s+k}} (zero-based k).
std::vector<double> anisotropic_norms(const StateVector& u, const GridSpec& grid);
/// Sum of the per-component anisotropic norms.
double anisotropic_norm(const StateVector& u, const GridSpec& grid);

enum class CutoffMode { Low, High };

/// Zeroes coefficients with |xi_k| < M (High) or |xi_k| >= M (Low); High + Low == u.
Field frequency_cutoff(const Field& u, double M, CutoffMode mode, const GridSpec& grid);

/// Share of the squared H^s mass carried by |xi| > 3/4 max|xi|.
double top_quarter_mass_fraction(const Field& u, double s, const GridSpec& grid);
/// Warning text when the top quarter of the spectrum holds more than `threshold` of the H^s mass.
std::vector<std::string> aliasing_warnings(const StateVector& u, const GridSpec& grid, double threshold = 1e-8);

/// Samples f(x) on the grid.
Field sample_field(const std::function<Complex(double)>& f, const GridSpec& grid);

/// CSV with header x,re,im.
void write_field_csv(std::ostream& os, const Field& u, const GridSpec& grid);
Field read_field_csv(std::istream& is);
/// CSV with header t,x,re,im; times[n] labels series[n].
void write_series_csv(std::ostream& os, const FieldSeries& series, const std::vector<double>& times,
                      const GridSpec& grid);

} // namespace hypertri

#endif

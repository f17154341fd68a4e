#include "hypertri/pdo.hpp"

#include "hypertri/fft.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace hypertri {

namespace {

// exp(i x_i xi_k) == exp(2 pi i (i k mod nx) / nx) on every torus length.
std::shared_ptr<const Eigen::MatrixXcd> phase_matrix(int nx) {
  thread_local std::map<int, std::shared_ptr<const Eigen::MatrixXcd>> cache;
  auto it = cache.find(nx);
  if (it != cache.end())
    return it->second;
  auto e = std::make_shared<Eigen::MatrixXcd>(nx, nx);
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < nx; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(i) * k) % nx) / nx;
      (*e)(i, k) = std::polar(1.0, angle);
    }
  return cache.emplace(nx, e).first->second;
}

void check_size(const Field& u, const GridSpec& grid) {
  if (u.size() != grid.nx())
    throw DimensionError("field has " + std::to_string(u.size()) + " samples, grid has " + std::to_string(grid.nx()));
}

} // namespace

QuantizedSymbol::QuantizedSymbol(ScalarSymbol a, const GridSpec& grid, std::size_t memo_bytes)
    : a_(std::move(a)), x_(grid.points()), xi_(grid.frequencies()), memo_limit_(memo_bytes) {
  if (!a_.depends_on_xi())
    kind_ = a_.depends_on_x() ? Kind::Multiplication : Kind::Constant;
  else if (!a_.depends_on_x())
    kind_ = Kind::FourierMultiplier;
  else {
    kind_ = Kind::General;
    phases_ = phase_matrix(grid.nx());
  }
}

const QuantizedSymbol::Table& QuantizedSymbol::table(double t) const {
  // A t-independent symbol has a single table, filed under t = 0.
  if (!a_.depends_on_t())
    t = 0.0;
  if (auto it = memo_.find(t); it != memo_.end())
    return it->second;
  if (scratch_t_ == t)
    return scratch_;

  Table out;
  switch (kind_) {
  case Kind::Constant: {
    Eigen::ArrayXd x0 = x_.head(1), xi0 = xi_.head(1);
    out.values = a_.sample(t, x0, xi0).matrix();
    break;
  }
  case Kind::Multiplication: {
    Eigen::ArrayXd xi0 = xi_.head(1);
    out.values = a_.sample(t, x_, xi0).matrix();
    break;
  }
  case Kind::FourierMultiplier: {
    Eigen::ArrayXd x0 = x_.head(1);
    out.values = a_.sample(t, x0, xi_).transpose().matrix();
    break;
  }
  case Kind::General: {
    const Eigen::ArrayXXcd sampled = a_.sample(t, x_, xi_);
    out.max_modulus = sampled.abs().maxCoeff();
    out.values = (phases_->array() * sampled).matrix() / static_cast<double>(x_.size());
    break;
  }
  }
  if (kind_ != Kind::General)
    out.max_modulus = out.values.cwiseAbs().maxCoeff();

  const std::size_t bytes = static_cast<std::size_t>(out.values.size()) * sizeof(Complex);
  if (memo_bytes_ + bytes <= memo_limit_) {
    memo_bytes_ += bytes;
    return memo_.emplace(t, std::move(out)).first->second;
  }
  scratch_ = std::move(out);
  scratch_t_ = t;
  return scratch_;
}

double QuantizedSymbol::max_modulus(double t) const { return table(t).max_modulus; }

Field QuantizedSymbol::apply(double t, const Field& u) const {
  if (u.size() != x_.size())
    throw DimensionError("field size does not match the quantisation grid");
  const Eigen::MatrixXcd& tab = table(t).values;
  switch (kind_) {
  case Kind::Constant:
    return tab(0, 0) * u;
  case Kind::Multiplication:
    return tab.col(0).cwiseProduct(u);
  case Kind::FourierMultiplier:
    return fft::inverse(tab.col(0).cwiseProduct(fft::forward(u)));
  case Kind::General:
    return tab * fft::forward(u);
  }
  return u;
}

Field apply_symbol(const ScalarSymbol& a, double t, const Field& u, const GridSpec& grid) {
  check_size(u, grid);
  return QuantizedSymbol(a, grid).apply(t, u);
}

double sobolev_norm(const Field& u, double s, const GridSpec& grid) {
  check_size(u, grid);
  const Eigen::VectorXcd uhat = fft::forward(u);
  const Eigen::ArrayXd weight = (1.0 + grid.frequencies().square()).pow(s);
  return std::sqrt((weight * uhat.array().abs2()).sum());
}

double sup_sobolev_norm(const FieldSeries& u, double s, const GridSpec& grid) {
  double out = 0.0;
  for (const auto& f : u)
    out = std::max(out, sobolev_norm(f, s, grid));
  return out;
}

std::vector<double> anisotropic_norms(const StateVector& u, const GridSpec& grid) {
  std::vector<double> out;
  for (int k = 0; k < u.size(); ++k)
    out.push_back(sobolev_norm(u.components[k], u.component_index(k), grid));
  return out;
}

double anisotropic_norm(const StateVector& u, const GridSpec& grid) {
  double out = 0.0;
  for (double v : anisotropic_norms(u, grid))
    out += v;
  return out;
}

Field frequency_cutoff(const Field& u, double M, CutoffMode mode, const GridSpec& grid) {
  check_size(u, grid);
  Eigen::VectorXcd uhat = fft::forward(u);
  int kept = 0;
  for (int k = 0; k < grid.nx(); ++k) {
    if (std::abs(grid.frequencies()(k)) >= M)
      ++kept;
    else
      uhat(k) = 0.0;
  }
  const bool high = mode == CutoffMode::High;
  if (kept == grid.nx())
    return high ? u : Field(Field::Zero(u.size()));
  if (kept == 0)
    return high ? Field(Field::Zero(u.size())) : u;
  // The low part is formed as the remainder so that High + Low reproduces u.
  Field high_part = fft::inverse(uhat);
  return high ? high_part : Field(u - high_part);
}

double top_quarter_mass_fraction(const Field& u, double s, const GridSpec& grid) {
  check_size(u, grid);
  const Eigen::VectorXcd uhat = fft::forward(u);
  const Eigen::ArrayXd weight = (1.0 + grid.frequencies().square()).pow(s);
  const Eigen::ArrayXd mass = weight * uhat.array().abs2();
  const double total = mass.sum();
  if (total == 0.0)
    return 0.0;
  const double edge = 0.75 * grid.max_frequency();
  double top = 0.0;
  for (int k = 0; k < grid.nx(); ++k)
    if (std::abs(grid.frequencies()(k)) > edge)
      top += mass(k);
  return top / total;
}

std::vector<std::string> aliasing_warnings(const StateVector& u, const GridSpec& grid, double threshold) {
  std::vector<std::string> out;
  for (int k = 0; k < u.size(); ++k) {
    const double frac = top_quarter_mass_fraction(u.components[k], u.component_index(k), grid);
    if (frac > threshold) {
      std::ostringstream os;
      os << "aliasing: component " << k + 1 << " carries " << frac
         << " of its H^s mass in the top quarter of the spectrum";
      out.push_back(os.str());
    }
  }
  return out;
}

Field sample_field(const std::function<Complex(double)>& f, const GridSpec& grid) {
  Field out(grid.nx());
  for (int i = 0; i < grid.nx(); ++i)
    out(i) = f(grid.point(i));
  return out;
}

void write_field_csv(std::ostream& os, const Field& u, const GridSpec& grid) {
  check_size(u, grid);
  os << "x,re,im\n" << std::setprecision(17);
  for (int i = 0; i < grid.nx(); ++i)
    os << grid.point(i) << ',' << u(i).real() << ',' << u(i).imag() << '\n';
}

Field read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "x,re,im")
    throw ParseError("field csv: missing header x,re,im");
  std::vector<Complex> vals;
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    std::istringstream ls(line);
    double x, re, im;
    char c1, c2;
    if (!(ls >> x >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',')
      throw ParseError("field csv: malformed row '" + line + "'");
    vals.emplace_back(re, im);
  }
  Field out(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = vals[i];
  return out;
}

void write_series_csv(std::ostream& os, const FieldSeries& series, const std::vector<double>& times,
                      const GridSpec& grid) {
  if (series.size() != times.size())
    throw DimensionError("series csv: times and fields differ in length");
  os << "t,x,re,im\n" << std::setprecision(17);
  for (std::size_t n = 0; n < series.size(); ++n) {
    check_size(series[n], grid);
    for (int i = 0; i < grid.nx(); ++i)
      os << times[n] << ',' << grid.point(i) << ',' << series[n](i).real() << ',' << series[n](i).imag() << '\n';
  }
}

} // namespace hypertri

#include "hypertri/scenario.hpp"

#include "hypertri/expression.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace hypertri {

namespace {

using nlohmann::json;

std::string expression_text(const json& v, const std::string& where) {
  if (v.is_string())
    return v.get<std::string>();
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  throw ParseError("scenario: " + where + " must be a string or a number");
}

ScalarSymbol symbol_at(const json& v, const std::string& where) {
  try {
    return expr::parse_symbol(expression_text(v, where));
  } catch (const ParseError& e) {
    throw ParseError("scenario: " + where + ": " + e.what());
  }
}

double real_constant(const json& v, const std::string& where) {
  if (v.is_number())
    return v.get<double>();
  const ScalarSymbol s = symbol_at(v, where);
  if (s.depends_on_t() || s.depends_on_x() || s.depends_on_xi())
    throw ParseError("scenario: " + where + " must be constant");
  const Complex c = s(0.0, 0.0, 0.0);
  if (c.imag() != 0.0)
    throw ParseError("scenario: " + where + " must be real");
  return c.real();
}

const json& require(const json& obj, const char* key) {
  if (!obj.contains(key))
    throw ParseError(std::string("scenario: missing key '") + key + "'");
  return obj.at(key);
}

int integer(const json& obj, const char* key, std::optional<int> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback)
      return *fallback;
    throw ParseError(std::string("scenario: missing key '") + key + "'");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw ParseError(std::string("scenario: '") + key + "' must be an integer");
  return v.get<int>();
}

VectorSymbol vector_at(const json& v, int m, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != m)
    throw ParseError("scenario: " + where + " must be a list of " + std::to_string(m) + " entries");
  VectorSymbol out;
  for (int i = 0; i < m; ++i)
    out.push_back(symbol_at(v[static_cast<std::size_t>(i)], where + "[" + std::to_string(i + 1) + "]"));
  return out;
}

MatrixSymbol matrix_at(const json& v, int m, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != m)
    throw ParseError("scenario: " + where + " must have " + std::to_string(m) + " rows");
  std::vector<ScalarSymbol> entries;
  for (int i = 0; i < m; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != m)
      throw ParseError("scenario: " + where + " row " + std::to_string(i + 1) + " must have " + std::to_string(m) +
                       " entries");
    for (int j = 0; j < m; ++j)
      entries.push_back(symbol_at(row[static_cast<std::size_t>(j)],
                                  where + "[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]"));
  }
  return MatrixSymbol::from_entries(m, entries);
}

std::vector<DataFn> data_at(const json& v, int m, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != m)
    throw ParseError("scenario: " + where + " must be a list of " + std::to_string(m) + " expressions");
  std::vector<DataFn> out;
  for (int i = 0; i < m; ++i) {
    const std::string w = where + "[" + std::to_string(i + 1) + "]";
    try {
      out.push_back(expr::parse_data(expression_text(v[static_cast<std::size_t>(i)], w)));
    } catch (const ParseError& e) {
      throw ParseError("scenario: " + w + ": " + e.what());
    }
  }
  return out;
}

void check_order(const ScalarSymbol& a, const GridSpec& grid, const std::string& where, std::vector<std::string>& out) {
  if (std::isinf(a.order()))
    return;
  const double est = estimate_order(a, grid);
  if (est > a.order() + 0.1) {
    std::ostringstream os;
    os << where << ": declared order " << a.order() << " but estimated " << est;
    out.push_back(os.str());
  }
}

} // namespace

SystemSpec Scenario::system() const {
  if (!lambda)
    throw ParseError("scenario: symbols.lambda is required for a system in triangular form");
  SystemSpec sp;
  sp.m = m;
  sp.s = s;
  sp.Lambda = *lambda;
  sp.Nupper = N;
  sp.B = B;
  sp.override_levi = override_levi;
  sp.u0 = sample_state(u0, 0.0, s, grid);
  const GridSpec g = grid;
  for (const DataFn& fn : f)
    sp.f.push_back([fn, g](double t) { return sample_field([&](double x) { return fn(t, x); }, g); });
  return sp;
}

StateVector sample_state(const std::vector<DataFn>& fns, double t, double s, const GridSpec& grid) {
  StateVector out;
  out.sobolev_base = s;
  for (const DataFn& fn : fns)
    out.components.push_back(sample_field([&](double x) { return fn(t, x); }, grid));
  return out;
}

Scenario parse_scenario(const std::string& text, const std::string& name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario: malformed JSON: ") + e.what());
  }
  if (!doc.is_object())
    throw ParseError("scenario: top level must be an object");

  Scenario sc;
  sc.name = name;
  sc.text = text;
  try {
    sc.m = integer(doc, "m");
    if (sc.m < 1 || sc.m > 8)
      throw ParseError("scenario: m must lie in 1..8");
    sc.s = doc.contains("s") ? real_constant(doc["s"], "s") : 0.0;
    const double T = real_constant(require(doc, "T_final"), "T_final");
    const double L = doc.contains("L") ? real_constant(doc["L"], "L") : 2.0 * std::numbers::pi;
    const double M = doc.contains("M") ? real_constant(doc["M"], "M") : 0.0;
    sc.grid = GridSpec(T, integer(doc, "nt"), L, integer(doc, "nx"), M);
    if (M < 0.0 || M >= sc.grid.max_frequency())
      throw ParseError("scenario: M must satisfy 0 <= M < max |xi|");
    sc.substeps = integer(doc, "substeps", 1);
    if (sc.substeps < 1)
      throw ParseError("scenario: substeps must be >= 1");
    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_unsigned())
        throw ParseError("scenario: seed must be a non-negative integer");
      sc.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("flags")) {
      const json& fl = doc["flags"];
      if (!fl.is_object())
        throw ParseError("scenario: flags must be an object");
      if (fl.contains("override_levi")) {
        if (!fl["override_levi"].is_boolean())
          throw ParseError("scenario: flags.override_levi must be a boolean");
        sc.override_levi = fl["override_levi"].get<bool>();
      }
    }

    if (doc.contains("tolerances")) {
      const json& tl = doc["tolerances"];
      if (!tl.is_object())
        throw ParseError("scenario: tolerances must be an object");
      const std::pair<const char*, double*> fields[] = {{"eps_cond", &sc.tolerances.eps_cond},
                                                        {"tol_eig", &sc.tolerances.tol_eig},
                                                        {"tol_tri", &sc.tolerances.tol_tri}};
      for (const auto& [key, dst] : fields)
        if (tl.contains(key)) {
          *dst = real_constant(tl[key], std::string("tolerances.") + key);
          if (!(*dst > 0.0))
            throw ParseError(std::string("scenario: tolerances.") + key + " must be positive");
        }
    }

    const json& sy = require(doc, "symbols");
    if (!sy.is_object())
      throw ParseError("scenario: symbols must be an object");
    const int m = sc.m;
    if (sy.contains("lambda"))
      sc.lambda = vector_at(sy["lambda"], m, "symbols.lambda");
    sc.N = sy.contains("N") ? matrix_at(sy["N"], m, "symbols.N") : MatrixSymbol::zero(m);
    sc.B = sy.contains("B") ? matrix_at(sy["B"], m, "symbols.B") : MatrixSymbol::zero(m);
    if (sy.contains("A"))
      sc.A = matrix_at(sy["A"], m, "symbols.A");
    if (sy.contains("eigenvalues") || sy.contains("eigenvectors")) {
      EigenData e;
      const json& ev = require(sy, "eigenvalues");
      if (!ev.is_array() || ev.size() < static_cast<std::size_t>(std::max(m - 1, 1)) ||
          ev.size() > static_cast<std::size_t>(m))
        throw ParseError("scenario: symbols.eigenvalues must list m - 1 or m entries");
      for (std::size_t i = 0; i < ev.size(); ++i)
        e.eigenvalues.push_back(symbol_at(ev[i], "symbols.eigenvalues[" + std::to_string(i + 1) + "]"));
      const json& vs = require(sy, "eigenvectors");
      if (!vs.is_array() || static_cast<int>(vs.size()) != m - 1)
        throw ParseError("scenario: symbols.eigenvectors must list m - 1 vectors");
      for (std::size_t i = 0; i < vs.size(); ++i)
        e.eigenvectors.push_back(vector_at(vs[i], m, "symbols.eigenvectors[" + std::to_string(i + 1) + "]"));
      sc.eigendata = std::move(e);
    }
    if (!sc.lambda && !sc.A)
      throw ParseError("scenario: symbols must provide lambda or A");

    sc.u0 = data_at(require(doc, "u0"), m, "u0");
    if (doc.contains("f"))
      sc.f = data_at(doc["f"], m, "f");
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }

  if (sc.lambda)
    for (int i = 0; i < sc.m; ++i)
      check_order((*sc.lambda)[static_cast<std::size_t>(i)], sc.grid, "lambda[" + std::to_string(i + 1) + "]",
                  sc.warnings);
  for (int i = 0; i < sc.m; ++i)
    for (int j = 0; j < sc.m; ++j) {
      const std::string at = "[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]";
      check_order(sc.N.entry(i, j), sc.grid, "N" + at, sc.warnings);
      check_order(sc.B.entry(i, j), sc.grid, "B" + at, sc.warnings);
      if (sc.A)
        check_order(sc.A->entry(i, j), sc.grid, "A" + at, sc.warnings);
    }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw MissingFile("cannot read scenario " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_scenario(os.str(), path.stem().string());
}

} // namespace hypertri

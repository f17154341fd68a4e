#include "hypertri/commands.hpp"

#include "hypertri/diagnostics.hpp"
#include "hypertri/eigendata.hpp"
#include "hypertri/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace hypertri {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double verify_tol = 1e-9;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw fs::filesystem_error("cannot write", path, std::make_error_code(std::errc::io_error));
  out << text;
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw MissingFile("missing " + path.filename().string() + " in " + path.parent_path().string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.filename().string() + ": " + e.what());
  }
}

/// Rows of a numeric CSV with a header line.
std::vector<std::vector<double>> read_csv(const fs::path& path, std::size_t columns) {
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw ParseError(path.filename().string() + " line " + std::to_string(rows.size() + 2) + ": bad number '" +
                         cell + "'");
      row.push_back(v);
    }
    if (row.size() != columns)
      throw ParseError(path.filename().string() + " line " + std::to_string(rows.size() + 2) + ": expected " +
                       std::to_string(columns) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

class CsvWriter {
public:
  explicit CsvWriter(const std::string& header) {
    os_ << std::setprecision(17);
    os_ << header << '\n';
  }
  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((os_ << (first ? "" : ",") << v, first = false), ...);
    os_ << '\n';
  }
  void save(const fs::path& path) const { write_text(path, os_.str()); }

private:
  std::ostringstream os_;
};

json grid_json(const Scenario& sc) {
  const GridSpec& g = sc.grid;
  return {{"T_final", g.T_final()}, {"nt", g.nt()}, {"L", g.length()}, {"nx", g.nx()},
          {"M", g.cutoff()},        {"substeps", sc.substeps}};
}

json witness_json(const Witness& w) { return {{"t", w.t}, {"x", w.x}, {"xi", w.xi}}; }

json strings(const std::vector<std::string>& v) {
  json out = json::array();
  for (const auto& s : v)
    out.push_back(s);
  return out;
}

/// Maps library errors to exit codes; writes a one-line diagnostic.
int guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const MissingFile& e) {
    log << "error: " << e.what() << '\n';
    return exit_code::missing_input;
  } catch (const ConditionFailure& e) {
    log << "condition failure: " << e.what() << '\n';
    return exit_code::condition_failure;
  } catch (const BadEigenpair& e) {
    log << "bad eigenpair: " << e.what() << '\n';
    return exit_code::eigendata_failure;
  } catch (const ContinuationError& e) {
    log << "continuation failure: " << e.what() << '\n';
    return exit_code::eigendata_failure;
  } catch (const SolveFailure& e) {
    log << "solve failure: " << e.what() << '\n';
    return exit_code::solve_failure;
  } catch (const InstabilityError& e) {
    log << "instability: " << e.what() << '\n';
    return exit_code::solve_failure;
  } catch (const NotContractive& e) {
    log << "solve failure: " << e.what() << '\n';
    return exit_code::solve_failure;
  } catch (const ParseError& e) {
    log << "parse error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const fs::filesystem_error& e) {
    log << "i/o error: " << e.what() << '\n';
    return exit_code::missing_input;
  } catch (const Error& e) {
    log << "invalid input: " << e.what() << '\n';
    return exit_code::usage;
  }
}

Scenario load_with_overrides(const fs::path& path, const CommandOptions& opt) {
  Scenario sc = load_scenario(path);
  if (opt.seed)
    sc.seed = *opt.seed;
  sc.override_levi = sc.override_levi || opt.override_levi;
  return sc;
}

fs::path prepare_out(const CommandOptions& opt) {
  if (opt.out.empty())
    throw ParseError("--out is required");
  fs::create_directories(opt.out);
  return opt.out;
}

EigenData eigendata_for(const Scenario& sc, std::string& source) {
  if (sc.eigendata) {
    source = "scenario";
    return *sc.eigendata;
  }
  source = "numeric";
  return numeric_eigendata(*sc.A, sc.grid);
}

ScalarSymbol clamp_frequency(const ScalarSymbol& a, double M) {
  if (M <= 0.0 || !a.depends_on_xi())
    return a;
  return ScalarSymbol(
      [a, M](double t, double x, double xi) { return a(t, x, xi < 0.0 ? std::min(xi, -M) : std::max(xi, M)); },
      a.order(), a.dependence());
}

MatrixSymbol clamp_frequency(const MatrixSymbol& A, double M) {
  std::vector<ScalarSymbol> entries;
  for (int i = 0; i < A.dim(); ++i)
    for (int j = 0; j < A.dim(); ++j)
      entries.push_back(clamp_frequency(A.entry(i, j), M));
  return MatrixSymbol::from_entries(A.dim(), entries);
}

std::vector<Field> apply_matrix(const MatrixSymbol& P, double t, const std::vector<Field>& u, const GridSpec& grid) {
  const int m = P.dim();
  std::vector<Field> out(static_cast<std::size_t>(m), Field::Zero(grid.nx()));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      out[static_cast<std::size_t>(i)] += apply_symbol(P.entry(i, j), t, u[static_cast<std::size_t>(j)], grid);
  return out;
}

json hypotheses_json(const HypothesisReport& h, bool override_levi) {
  json levi = json::array();
  for (const OrderCheck& c : h.levi)
    levi.push_back({{"i", c.i}, {"j", c.j}, {"estimated", c.estimated}, {"required", c.required}, {"pass", c.pass}});
  return {{"levi", levi},
          {"max_imag_lambda", h.max_imag_lambda},
          {"lambda_real", h.lambda_real},
          {"max_lower_N", h.max_lower_N},
          {"n_strictly_upper", h.n_strictly_upper},
          {"data_finite", h.data_finite},
          {"issues", strings(h.issues)},
          {"passes", h.passes()},
          {"override_levi", override_levi}};
}

json neumann_json(const CascadeSolution& sol) {
  json slabs = json::array();
  for (const SlabStats& s : sol.neumann_stats) {
    json levels = json::array();
    for (const LevelStats& l : s.levels)
      levels.push_back({{"level", l.level + 1},
                        {"inversions", l.inversions},
                        {"total_iterations", l.total_iterations},
                        {"max_iterations", l.max_iterations},
                        {"rho_max", l.rho_max},
                        {"solve_iterations", l.solve.iterations},
                        {"solve_rho", l.solve.rho}});
    slabs.push_back({{"t_start", s.t_start}, {"t_end", s.t_end}, {"levels", levels}});
  }
  return {{"halvings", sol.halvings}, {"slabs", slabs}};
}

void write_fit(json& report, const GrowthFit& fit) {
  report["c_fit"] = fit.c_fit;
  report["raw_slope"] = fit.raw_slope;
  report["residual"] = fit.residual;
  report["window"] = {fit.window_start, fit.window_end};
  report["flagged"] = fit.flagged;
}

bool close(double a, double b) { return std::abs(a - b) <= verify_tol * std::max(1.0, std::abs(b)); }

int mismatch(std::ostream& log, const std::string& what) {
  log << "mismatch: " << what << '\n';
  return exit_code::mismatch;
}

int verify_triangularise(const fs::path& dir, const json& report, std::ostream& log) {
  const std::string status = report.value("status", "");
  if (status != "ok" && status != "residual_failure")
    return exit_code::ok;
  const Scenario sc = parse_scenario(read_text(dir / "scenario.json"), "scenario");
  if (!sc.A)
    throw ParseError("scenario.json has no symbols.A");
  const int m = sc.m;
  const auto T = read_csv(dir / "T.csv", 7), Ti = read_csv(dir / "Tinv.csv", 7), N = read_csv(dir / "N.csv", 7);
  const auto Lam = read_csv(dir / "Lambda.csv", 6);
  const std::size_t mm = static_cast<std::size_t>(m * m);
  const std::size_t nodes = T.size() / mm;
  if (T.size() % mm != 0 || Ti.size() != T.size() || N.size() != T.size() || Lam.size() != nodes * m)
    return mismatch(log, "CSV row counts are inconsistent");
  if (nodes != static_cast<std::size_t>(sc.grid.nt()) * sc.grid.nx() * sc.grid.shell_indices().size())
    return mismatch(log, "T.csv node count does not match the grid");

  auto matrix = [&](const std::vector<std::vector<double>>& rows, std::size_t node) {
    Eigen::MatrixXcd out(m, m);
    for (std::size_t r = node * mm; r < (node + 1) * mm; ++r)
      out(static_cast<int>(rows[r][3]) - 1, static_cast<int>(rows[r][4]) - 1) = Complex(rows[r][5], rows[r][6]);
    return out;
  };
  double total = 0.0, below = 0.0, inverse = 0.0;
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(m, m);
  for (std::size_t node = 0; node < nodes; ++node) {
    const auto& at = T[node * mm];
    const Eigen::MatrixXcd Tn = matrix(T, node), Tin = matrix(Ti, node);
    Eigen::MatrixXcd target = matrix(N, node);
    for (int i = 0; i < m; ++i) {
      const auto& r = Lam[node * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)];
      target(static_cast<int>(r[3]) - 1, static_cast<int>(r[3]) - 1) += Complex(r[4], r[5]);
    }
    const Eigen::MatrixXcd M = Tin * (*sc.A)(at[0], at[1], at[2]) * Tn;
    total = std::max(total, (M - target).cwiseAbs().maxCoeff());
    for (int i = 1; i < m; ++i)
      for (int j = 0; j < i; ++j)
        below = std::max(below, std::abs(M(i, j)));
    inverse = std::max(inverse, (Tin * Tn - I).cwiseAbs().maxCoeff());
  }
  const json& v = report.at("verification");
  const std::pair<const char*, double> checks[] = {
      {"residual_total", total}, {"residual_below_diag", below}, {"residual_inverse", inverse}};
  for (const auto& [key, value] : checks) {
    if (!v.contains(key) || !v[key].is_number())
      return mismatch(log, std::string("report.json lacks verification.") + key);
    if (std::abs(v[key].get<double>() - value) > verify_tol)
      return mismatch(log, std::string(key) + ": report " + v[key].dump() + ", recomputed " + json(value).dump());
  }
  log << "verified " << nodes << " shell nodes\n";
  return exit_code::ok;
}

int verify_solve(const fs::path& dir, const json& report, std::ostream& log) {
  if (report.value("status", "") != "ok")
    return exit_code::ok;
  const Scenario sc = parse_scenario(read_text(dir / "scenario.json"), "scenario");
  const GridSpec& g = sc.grid;
  const int m = sc.m, nx = g.nx(), nt = g.nt();
  const auto norms = read_csv(dir / "norms.csv", 3);
  const auto sol = read_csv(dir / "solution.csv", 5);
  if (sol.size() != static_cast<std::size_t>(nt) * m * nx)
    return mismatch(log, "solution.csv has " + std::to_string(sol.size()) + " rows, expected " +
                             std::to_string(static_cast<std::size_t>(nt) * m * nx));
  if (norms.size() != static_cast<std::size_t>(nt) * m)
    return mismatch(log, "norms.csv has " + std::to_string(norms.size()) + " rows, expected " +
                             std::to_string(nt * m));
  std::vector<double> times, totals;
  for (int n = 0; n < nt; ++n) {
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
      Field u(nx);
      const std::size_t base = (static_cast<std::size_t>(n) * m + k) * nx;
      for (int i = 0; i < nx; ++i)
        u(i) = Complex(sol[base + i][3], sol[base + i][4]);
      const double recomputed = sobolev_norm(u, sc.s + k, g);
      const auto& row = norms[static_cast<std::size_t>(n) * m + k];
      const std::string where = "norms.csv row " + std::to_string(n * m + k + 2);
      if (!close(row[0], sol[base][0]) || static_cast<int>(row[1]) != k + 1)
        return mismatch(log, where + ": (t, k) do not match solution.csv");
      if (!close(row[2], recomputed))
        return mismatch(log, where + ": stored norm " + json(row[2]).dump() + ", recomputed " + json(recomputed).dump());
      total += row[2];
    }
    times.push_back(norms[static_cast<std::size_t>(n) * m][0]);
    totals.push_back(total);
  }
  if (report.contains("c_fit") && report["c_fit"].is_number()) {
    const GrowthFit fit = fit_exponential_bound(times, totals, report.at("data_norm").get<double>());
    const std::pair<const char*, double> checks[] = {
        {"c_fit", fit.c_fit}, {"raw_slope", fit.raw_slope}, {"residual", fit.residual}};
    for (const auto& [key, value] : checks)
      if (!report.contains(key) || !close(report[key].get<double>(), value))
        return mismatch(log, std::string(key) + ": report " + report.value(key, json()).dump() + ", recomputed " +
                                 json(value).dump());
  }
  log << "verified " << nt << " time levels of " << m << " components\n";
  return exit_code::ok;
}

} // namespace

std::optional<SolveMode> parse_mode(const std::string& s) {
  if (s == "cascade")
    return SolveMode::Cascade;
  if (s == "reference")
    return SolveMode::Reference;
  if (s == "both")
    return SolveMode::Both;
  return std::nullopt;
}

int cmd_triangularise(const CommandOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    const Scenario sc = load_with_overrides(opt.scenario, opt);
    if (!sc.A)
      throw ParseError("triangularise needs symbols.A");
    const fs::path out = prepare_out(opt);
    write_text(out / "scenario.json", sc.text);
    const MatrixSymbol& A = *sc.A;
    const GridSpec& grid = sc.grid;
    const int m = sc.m;
    const SchurTolerances& tol = sc.tolerances;

    json report;
    report["command"] = "triangularise";
    report["scenario"] = sc.name;
    report["seed"] = sc.seed;
    report["m"] = m;
    report["grid"] = grid_json(sc);
    report["tol_tri"] = tol.tol_tri;
    std::vector<std::string> warnings = sc.warnings;

    std::string source;
    const EigenData eig = eigendata_for(sc, source);
    report["eigendata_source"] = source;
    warnings.insert(warnings.end(), eig.warnings.begin(), eig.warnings.end());

    TriangularResult res = [&] {
      try {
        return full_triangularise(A, eig, grid, tol);
      } catch (const ConditionFailure& e) {
        report["status"] = "condition_failure";
        report["error"] = e.what();
        report["witness"] = witness_json(e.where());
        report["min_modulus"] = e.min_modulus();
        report["step"] = e.step();
        report["warnings"] = strings(warnings);
        write_json(out / "report.json", report);
        throw;
      } catch (const BadEigenpair& e) {
        report["status"] = "bad_eigenpair";
        report["error"] = e.what();
        report["witness"] = witness_json(e.where());
        report["eigen_residual"] = e.residual();
        report["step"] = e.step();
        report["warnings"] = strings(warnings);
        write_json(out / "report.json", report);
        throw;
      }
    }();

    const VerificationReport ver = verify_triangular(A, res, grid, &eig);
    json vj;
    for (const auto& [key, value] : ver.fields())
      vj[key] = value;
    report["verification"] = vj;
    const bool passes = ver.passes(tol.tol_tri);
    report["passes"] = passes;
    report["status"] = passes ? "ok" : "residual_failure";

    json conds = json::array();
    for (std::size_t k = 0; k < res.conditions.size(); ++k)
      conds.push_back({{"step", k + 1},
                       {"pivot", res.conditions[k].pivot + 1},
                       {"min_modulus", res.conditions[k].min_modulus},
                       {"where", witness_json(res.conditions[k].where)}});
    report["conditions"] = conds;
    json perms = json::array();
    for (const auto& [a, b] : res.permutations)
      perms.push_back({a + 1, b + 1});
    report["permutations"] = perms;

    CsvWriter t_csv("t,x,xi,i,j,re,im"), ti_csv("t,x,xi,i,j,re,im"), n_csv("t,x,xi,i,j,re,im"),
        l_csv("t,x,xi,i,re,im");
    double dev_identity = 0.0;
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(m, m);
    for_each_shell_node(grid, [&](double t, double x, double xi) {
      const Eigen::MatrixXcd T = res.T(t, x, xi), Ti = res.Tinv(t, x, xi), N = res.N(t, x, xi);
      const Eigen::VectorXcd lam = evaluate(res.Lambda, t, x, xi);
      dev_identity = std::max(dev_identity, (T - I).cwiseAbs().maxCoeff());
      for (int i = 0; i < m; ++i) {
        l_csv.row(t, x, xi, i + 1, lam(i).real(), lam(i).imag());
        for (int j = 0; j < m; ++j) {
          t_csv.row(t, x, xi, i + 1, j + 1, T(i, j).real(), T(i, j).imag());
          ti_csv.row(t, x, xi, i + 1, j + 1, Ti(i, j).real(), Ti(i, j).imag());
          n_csv.row(t, x, xi, i + 1, j + 1, N(i, j).real(), N(i, j).imag());
        }
      }
    });
    t_csv.save(out / "T.csv");
    ti_csv.save(out / "Tinv.csv");
    n_csv.save(out / "N.csv");
    l_csv.save(out / "Lambda.csv");
    report["T_is_identity"] = dev_identity == 0.0;

    // Off-grid audit at seeded random nodes; report-only.
    std::mt19937_64 rng(sc.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double lo = std::max(grid.cutoff(), 2.0 * std::numbers::pi / grid.length());
    double offgrid = 0.0;
    for (int p = 0; p < 32; ++p) {
      const double t = unit(rng) * grid.T_final(), x = unit(rng) * grid.length();
      const double mag = lo + unit(rng) * (grid.max_frequency() - lo);
      const double xi = unit(rng) < 0.5 ? -mag : mag;
      Eigen::MatrixXcd target = res.N(t, x, xi);
      target.diagonal() += evaluate(res.Lambda, t, x, xi);
      offgrid = std::max(offgrid, (res.Tinv(t, x, xi) * A(t, x, xi) * res.T(t, x, xi) - target).cwiseAbs().maxCoeff());
    }
    report["offgrid_residual"] = offgrid;
    report["warnings"] = strings(warnings);
    write_json(out / "report.json", report);

    for (const auto& w : warnings)
      log << "warning: " << w << '\n';
    log << "residual_total " << ver.residual_total << ", residual_below_diag " << ver.residual_below_diag << '\n';
    return passes ? exit_code::ok : exit_code::mismatch;
  });
}

int cmd_solve(const CommandOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    const fs::path scenario_path = opt.from_triangularised ? *opt.from_triangularised / "scenario.json" : opt.scenario;
    const Scenario sc = load_with_overrides(scenario_path, opt);
    const fs::path out = prepare_out(opt);
    write_text(out / "scenario.json", sc.text);
    const GridSpec& grid = sc.grid;

    json report;
    report["command"] = "solve";
    report["scenario"] = sc.name;
    report["seed"] = sc.seed;
    report["m"] = sc.m;
    report["s"] = sc.s;
    report["grid"] = grid_json(sc);
    report["mode"] = opt.mode == SolveMode::Cascade ? "cascade" : opt.mode == SolveMode::Reference ? "reference" : "both";
    std::vector<std::string> warnings = sc.warnings;

    SystemSpec spec;
    if (opt.from_triangularised) {
      if (!sc.A)
        throw ParseError("--from-triangularised needs symbols.A in the stored scenario");
      std::string source;
      const EigenData eig = eigendata_for(sc, source);
      const TriangularResult res = full_triangularise(*sc.A, eig, grid, sc.tolerances);
      const double M = grid.cutoff();
      const MatrixSymbol Tinv = clamp_frequency(res.Tinv, M);
      spec.m = sc.m;
      spec.s = sc.s;
      for (const ScalarSymbol& l : res.Lambda)
        spec.Lambda.push_back(clamp_frequency(l, M));
      spec.Nupper = clamp_frequency(res.N, M);
      spec.B = sc.B;
      spec.override_levi = sc.override_levi;
      const StateVector raw = sample_state(sc.u0, 0.0, sc.s, grid);
      StateVector high = raw, low = raw;
      for (int k = 0; k < sc.m; ++k) {
        high.components[k] = frequency_cutoff(raw.components[k], M, CutoffMode::High, grid);
        low.components[k] = frequency_cutoff(raw.components[k], M, CutoffMode::Low, grid);
      }
      spec.u0.sobolev_base = sc.s;
      spec.u0.components = apply_matrix(Tinv, 0.0, high.components, grid);
      report["low_frequency_norm"] = anisotropic_norm(low, grid);
      report["eigendata_source"] = source;
      if (!sc.f.empty()) {
        const std::vector<DataFn> f = sc.f;
        for (int i = 0; i < sc.m; ++i)
          spec.f.push_back([f, Tinv, grid, i](double t) {
            std::vector<Field> ft;
            for (const DataFn& fn : f)
              ft.push_back(sample_field([&](double x) { return fn(t, x); }, grid));
            return apply_matrix(Tinv, t, ft, grid)[static_cast<std::size_t>(i)];
          });
      }
    } else {
      spec = sc.system();
    }

    const HypothesisReport hyp = check_hypotheses(spec, grid);
    report["hypotheses"] = hypotheses_json(hyp, spec.override_levi);
    const double data_norm = anisotropic_norm(spec.u0, grid);
    report["data_norm"] = data_norm;
    report["orders"] = json::array();

    auto finish = [&](const std::string& status, int code) {
      report["status"] = status;
      report["warnings"] = strings(warnings);
      write_json(out / "report.json", report);
      for (const auto& w : warnings)
        log << "warning: " << w << '\n';
      return code;
    };

    if (!hyp.passes()) {
      if (!spec.override_levi) {
        for (const auto& issue : hyp.issues)
          log << "hypothesis: " << issue << '\n';
        return finish("hypothesis_failure", exit_code::hypothesis_failure);
      }
      warnings.push_back("hypotheses fail; solving under override_levi");
    }

    CascadeOptions co;
    co.substeps = sc.substeps;
    if (opt.tol_fp)
      co.tol_fp = *opt.tol_fp;
    report["tol_fp"] = co.tol_fp;

    CascadeSolution sol;
    try {
      if (opt.mode == SolveMode::Reference) {
        sol = solve_reference(spec, grid, co.substeps);
      } else {
        sol = solve_cascade(spec, grid, co);
        report["neumann_stats"] = neumann_json(sol);
        if (opt.mode == SolveMode::Both) {
          const CascadeSolution ref = solve_reference(spec, grid, co.substeps);
          report["comparison"] = {{"relative_discrepancy", relative_discrepancy(sol, grid, ref, grid, spec.s)}};
        }
      }
    } catch (const Error& e) {
      if (!dynamic_cast<const SolveFailure*>(&e) && !dynamic_cast<const InstabilityError*>(&e) &&
          !dynamic_cast<const NotContractive*>(&e))
        throw;
      report["error"] = e.what();
      log << "solve failure: " << e.what() << '\n';
      return finish("solve_failure", exit_code::solve_failure);
    }

    try {
      write_fit(report, fit_solution_growth(sol, data_norm));
    } catch (const Error& e) {
      report["c_fit"] = nullptr;
      warnings.push_back(std::string("growth fit skipped: ") + e.what());
    }

    CsvWriter norms("t,k,norm"), solution("t,x,k,re,im");
    for (std::size_t n = 0; n < sol.times.size(); ++n)
      for (int k = 0; k < spec.m; ++k) {
        norms.row(sol.times[n], k + 1, sol.norm_trace[n][static_cast<std::size_t>(k)]);
        const Field& u = sol.components[static_cast<std::size_t>(k)][n];
        for (int i = 0; i < grid.nx(); ++i)
          solution.row(sol.times[n], grid.point(i), k + 1, u(i).real(), u(i).imag());
      }
    norms.save(out / "norms.csv");
    solution.save(out / "solution.csv");
    if (report.contains("c_fit") && report["c_fit"].is_number())
      log << "c_fit " << report["c_fit"].get<double>() << ", residual " << report["residual"].get<double>() << '\n';
    if (report.contains("comparison"))
      log << "relative discrepancy vs reference " << report["comparison"]["relative_discrepancy"].dump() << '\n';
    return finish("ok", exit_code::ok);
  });
}

int cmd_verify(const fs::path& dir, std::ostream& log) {
  return guarded(log, [&] {
    if (!fs::is_directory(dir))
      throw MissingFile("no such directory " + dir.string());
    const json report = read_json(dir / "report.json");
    const std::string command = report.value("command", "");
    try {
      if (command == "triangularise")
        return verify_triangularise(dir, report, log);
      if (command == "solve")
        return verify_solve(dir, report, log);
    } catch (const ParseError& e) {
      return mismatch(log, e.what());
    } catch (const json::exception& e) {
      return mismatch(log, std::string("report.json: ") + e.what());
    }
    return mismatch(log, "report.json names no known command");
  });
}

} // namespace hypertri

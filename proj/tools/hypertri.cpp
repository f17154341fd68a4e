#include "hypertri/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Flags {
  std::string scenario;
  std::string out;
  std::string mode = "cascade";
  bool override_levi = false;
  std::string from_triangularised;
  std::uint64_t seed = 0;
  double tol_fp = 1e-10;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--scenario", f.scenario, "Scenario JSON file")->envname("HYPERTRI_SCENARIO");
  cmd->add_option("--out", f.out, "Output directory")->envname("HYPERTRI_OUT");
  cmd->add_option("--seed", f.seed, "Seed for randomised probes")->envname("HYPERTRI_SEED");
}

hypertri::CommandOptions options(const Flags& f, const CLI::App* cmd) {
  hypertri::CommandOptions o;
  o.scenario = f.scenario;
  o.out = f.out;
  o.override_levi = f.override_levi;
  if (cmd->count("--seed") > 0)
    o.seed = f.seed;
  if (!f.from_triangularised.empty())
    o.from_triangularised = f.from_triangularised;
  return o;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Triangularisation and cascade solver for first-order pseudodifferential systems"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* tri = app.add_subcommand("triangularise", "Reduce a full principal part to upper-triangular form");
  add_common(tri, f);

  CLI::App* solve = app.add_subcommand("solve", "Solve a system in upper-triangular form");
  add_common(solve, f);
  solve->add_option("--mode", f.mode, "cascade, reference or both")
      ->check(CLI::IsMember({"cascade", "reference", "both"}))
      ->envname("HYPERTRI_MODE");
  solve->add_flag("--override-levi", f.override_levi, "Solve even when the order hypotheses fail")
      ->envname("HYPERTRI_OVERRIDE_LEVI");
  solve->add_option("--from-triangularised", f.from_triangularised, "Output directory of a triangularise run")
      ->envname("HYPERTRI_FROM_TRIANGULARISED");
  solve->add_option("--tol-fp", f.tol_fp, "Neumann stopping tolerance")->envname("HYPERTRI_TOL_FP");

  CLI::App* verify = app.add_subcommand("verify", "Recheck stored artifacts against their report");
  verify->add_option("--out", f.out, "Output directory of a previous run")->envname("HYPERTRI_OUT")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hypertri::exit_code::usage;
  }

  if (tri->parsed()) {
    if (f.scenario.empty() || f.out.empty()) {
      std::cerr << "triangularise needs --scenario and --out\n";
      return hypertri::exit_code::usage;
    }
    return hypertri::cmd_triangularise(options(f, tri), std::cerr);
  }
  if (solve->parsed()) {
    if ((f.scenario.empty() && f.from_triangularised.empty()) || f.out.empty()) {
      std::cerr << "solve needs --out and one of --scenario or --from-triangularised\n";
      return hypertri::exit_code::usage;
    }
    hypertri::CommandOptions o = options(f, solve);
    o.mode = *hypertri::parse_mode(f.mode);
    if (solve->count("--tol-fp") > 0) {
      if (!(f.tol_fp > 0.0)) {
        std::cerr << "--tol-fp must be positive\n";
        return hypertri::exit_code::usage;
      }
      o.tol_fp = f.tol_fp;
    }
    return hypertri::cmd_solve(o, std::cerr);
  }
  return hypertri::cmd_verify(f.out, std::cerr);
}

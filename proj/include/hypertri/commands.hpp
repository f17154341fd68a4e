#ifndef HYPERTRI_COMMANDS_HPP
#define HYPERTRI_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace hypertri {

/// Process exit codes. Every library error maps to exactly one of these.
namespace exit_code {
inline constexpr int ok = 0;
/// Residuals above tolerance, or stored artifacts disagree with their report.
inline constexpr int mismatch = 1;
inline constexpr int condition_failure = 2;
inline constexpr int hypothesis_failure = 3;
/// SolveFailure or InstabilityError.
inline constexpr int solve_failure = 4;
/// BadEigenpair or ContinuationError.
inline constexpr int eigendata_failure = 5;
/// ParseError, PreconditionError, DimensionError, bad flags.
inline constexpr int usage = 64;
inline constexpr int missing_input = 66;
} // namespace exit_code

enum class SolveMode { Cascade, Reference, Both };

struct CommandOptions {
  std::filesystem::path scenario;
  std::filesystem::path out;
  SolveMode mode = SolveMode::Cascade;
  /// Ored with the scenario flag.
  bool override_levi = false;
  /// Read the scenario from a triangularise output directory and solve its triangular form.
  std::optional<std::filesystem::path> from_triangularised;
  /// Replace the scenario seed.
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_fp;
};

/// Writes T.csv, Tinv.csv, Lambda.csv, N.csv, scenario.json and report.json to opt.out.
int cmd_triangularise(const CommandOptions& opt, std::ostream& log);
/// Writes norms.csv, solution.csv, scenario.json and report.json to opt.out.
int cmd_solve(const CommandOptions& opt, std::ostream& log);
/// Recomputes residuals or norms and the growth fit from the CSVs in dir and compares them with report.json.
int cmd_verify(const std::filesystem::path& dir, std::ostream& log);

std::optional<SolveMode> parse_mode(const std::string& s);

} // namespace hypertri

#endif

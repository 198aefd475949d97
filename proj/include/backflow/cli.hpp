#pragma once

#include "backflow/momentum_state.hpp"
#include "backflow/numerics.hpp"
#include "backflow/propagator.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace backflow::cli {

enum class Command { Series, DeltaMax, Current, Validate };
enum class Format { Csv, Json };

/// Exit-code contract of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailure = 1,
  kExitUsage = 2,
  kExitNumerical = 3,
};

inline constexpr const char* kBuiltinReference = "builtin:bm94";

struct RunConfig {
  Command command = Command::Series;
  /// kBuiltinReference or a path to a JSON state file.
  std::string state_source = kBuiltinReference;
  double t_max = 0.1;
  int n_points = 200;
  /// Particle numbers for the P_minus_N columns of the series command.
  std::vector<int> n_list{1, 2, 3, 4, 5, 6};
  int n_max = 20;
  Format format = Format::Csv;
  /// Empty means standard output.
  std::string out;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double switch_time = 1e-3;
  int series_order = 6;

  /// Throws InvalidArgument listing every out-of-range field.
  void validate() const;
  numerics::QuadratureSpec quadrature_spec() const;
};

/// Parses {"terms":[{"re":..,"im":..,"power":..,"decay":..}], "normalize": bool}.
/// "im" defaults to 0 and "normalize" to false. Throws ParseError on malformed
/// input and InvariantViolation on a term the state type rejects.
MomentumAmplitude parse_state(const std::string& text);

/// kBuiltinReference or a file path.
MomentumAmplitude load_state(const std::string& source);

/// Closed-form/series dispatch for the built-in reference state, momentum
/// quadrature for anything loaded from a file.
WaveEvaluator make_evaluator(const RunConfig& cfg);

/// Uniform grid of n_points times on [0, t_max].
std::vector<double> time_grid(const RunConfig& cfg);

// Each command writes its table to `out` and diagnostics to `err`, and returns
// an ExitCode. Configuration problems map to kExitUsage and numerical
// failures to kExitNumerical.
int cmd_series(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_deltamax(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_current(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Dispatches on cfg.command and honours cfg.out.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line: flag parsing, then run().
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace backflow::cli

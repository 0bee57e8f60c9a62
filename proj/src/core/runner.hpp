#pragma once

#include "core/serialize.hpp"

namespace plgl {

// ---------------------------------------------------------------------------
/// CLI-facing configuration. Unknown keys are rejected; all numerics must be
/// positive and the radius capped at 0.5.
struct RunConfig {
  std::string algebra = "su2-lu-weinstein";
  std::string algebra_file;  // with rep_file, replaces the builtin
  std::string rep_file;

  Numerics numerics;
  double radius = 0.2;
  int points = 50;
  std::uint64_t seed = 42;

  std::string experiment;  // for the verify command
  double r1 = 0.06, r2 = 0.1;
  std::vector<double> t_values = {0.25, 0.5, 0.75};
  double tolerance = 0.0;  // 0 = experiment default

  int threads = 0;
  std::string out_dir;
  bool emit_csv = false;

  static RunConfig from_json(const Json& j);
  Json to_json() const;

  ContextPtr make_context() const;
  ExperimentParams params() const;
};

struct RunResult {
  int exit_code = 0;  // 0 pass, 1 tolerance fail, 2 input error
  std::string report_json;
  std::string csv;  // linearize samples, when requested
};

RunResult run_check_algebra(const RunConfig& cfg);
RunResult run_linearize(const RunConfig& cfg);
RunResult run_verify(const RunConfig& cfg);

/// Dispatch by command name ("check-algebra", "linearize", "verify").
/// Never throws: input errors come back as exit code 2 with a JSON error
/// report, tolerance failures as exit code 1.
RunResult run_command(const std::string& command, const RunConfig& cfg);
RunResult run_command_json(const std::string& command, const std::string& config_json);

}  // namespace plgl

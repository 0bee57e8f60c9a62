// plgl command-line front end. Links only the C API; argument parsing and
// config merging use the vendored header-only CLI11 / nlohmann-json.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "plgl/plgl.h"

int main(int argc, char** argv) {
  CLI::App app{"Poisson linearization of dual Poisson-Lie groups"};
  app.require_subcommand(1);

  std::string config_path, algebra, experiment, out_dir;
  double tolerance = 0.0, radius = 0.0, r1 = -1.0, r2 = -1.0;
  int steps = 0, points = 0, threads = 0;
  long long seed = -1;
  bool csv = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--algebra", algebra, "builtin algebra name");
    cmd->add_option("--tolerance", tolerance, "override the experiment tolerance");
    cmd->add_option("--steps", steps, "RK4 steps");
    cmd->add_option("--radius", radius, "sample-ball radius");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--points", points, "sample count");
    cmd->add_option("--threads", threads, "worker threads over sample points");
    cmd->add_option("--out", out_dir, "output directory for report.json / samples.csv");
    cmd->add_flag("--csv", csv, "emit samples.csv (linearize)");
  };

  CLI::App* c_check =
      app.add_subcommand("check-algebra", "run the algebraic invariant suite");
  CLI::App* c_lin = app.add_subcommand(
      "linearize", "build the pipeline and verify the linearization theorem");
  CLI::App* c_ver = app.add_subcommand("verify", "run a named experiment");
  add_common(c_check);
  add_common(c_lin);
  add_common(c_ver);
  c_ver->add_option("--experiment", experiment,
                    "scaling-laws | orbit-product | addmult | functoriality | "
                    "functoriality-identity | linearize");
  c_ver->add_option("--r1", r1, "first orbit radius (orbit-product)");
  c_ver->add_option("--r2", r2, "second orbit radius (orbit-product)");

  CLI11_PARSE(app, argc, argv);

  nlohmann::json cfg = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::fprintf(stderr, "error: cannot open config '%s'\n", config_path.c_str());
      return 2;
    }
    try {
      in >> cfg;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: malformed config JSON: %s\n", e.what());
      return 2;
    }
    if (!cfg.is_object()) {
      std::fprintf(stderr, "error: config must be a JSON object\n");
      return 2;
    }
  }
  if (!algebra.empty()) cfg["algebra"] = algebra;
  if (steps > 0) cfg["numerics"]["rk4_steps"] = steps;
  if (radius > 0) cfg["domain"]["radius"] = radius;
  if (points > 0) cfg["domain"]["samples"] = points;
  if (seed >= 0) cfg["domain"]["seed"] = seed;
  if (!experiment.empty()) cfg["experiment"]["name"] = experiment;
  if (tolerance > 0) cfg["experiment"]["tolerance"] = tolerance;
  if (r1 >= 0) cfg["experiment"]["r1"] = r1;
  if (r2 >= 0) cfg["experiment"]["r2"] = r2;
  if (!out_dir.empty()) cfg["output"]["dir"] = out_dir;
  if (csv) cfg["output"]["csv"] = true;
  if (threads > 0) cfg["threads"] = threads;

  plgl_session* session = plgl_session_new();
  if (!session) {
    std::fprintf(stderr, "error: out of memory\n");
    return 2;
  }

  plgl_status st = plgl_configure(session, cfg.dump().c_str());
  if (st != PLGL_OK) {
    const char* err = plgl_last_error(session);
    std::fprintf(stderr, "error: %s\n", err ? err : "invalid configuration");
    plgl_session_free(session);
    return 2;
  }

  const char* command = c_check->parsed() ? "check-algebra"
                        : c_lin->parsed() ? "linearize"
                                          : "verify";
  st = plgl_run(session, command);

  const char* report = plgl_report_json(session);
  if (report) std::fputs(report, stdout);
  const char* csv_text = plgl_samples_csv(session);
  if (csv_text && out_dir.empty()) std::fputs(csv_text, stdout);
  if (st == PLGL_ERR_INPUT || st == PLGL_ERR_INTERNAL) {
    const char* err = plgl_last_error(session);
    if (err) std::fprintf(stderr, "error: %s\n", err);
  }

  plgl_session_free(session);
  return st == PLGL_OK ? 0 : (st == PLGL_FAIL_TOLERANCE ? 1 : 2);
}

#include "core/runner.hpp"

#include <filesystem>
#include <sstream>

namespace plgl {

namespace {

void check_positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw InputError("config: " + what + " must be positive");
}

void reject_unknown(const Json& j, const std::vector<std::string>& keys,
                    const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : keys)
      if (it.key() == k) ok = true;
    if (!ok) throw InputError("config: unknown key '" + scope + it.key() + "'");
  }
}

}  // namespace

RunConfig RunConfig::from_json(const Json& j) {
  RunConfig cfg;
  reject_unknown(j, {"algebra", "numerics", "domain", "experiment", "output", "threads"},
                 "");
  if (j.contains("algebra")) {
    const auto& a = j["algebra"];
    if (a.is_string()) {
      cfg.algebra = a.get<std::string>();
    } else if (a.is_object()) {
      reject_unknown(a, {"spec", "rep"}, "algebra.");
      if (!a.contains("spec") || !a.contains("rep"))
        throw InputError("config: algebra object needs 'spec' and 'rep' paths");
      cfg.algebra_file = a["spec"].get<std::string>();
      cfg.rep_file = a["rep"].get<std::string>();
      cfg.algebra.clear();
    } else {
      throw InputError("config: 'algebra' must be a name or {spec, rep}");
    }
  }
  if (j.contains("numerics")) {
    const auto& n = j["numerics"];
    reject_unknown(n, {"fd_step", "rk4_steps", "quad_nodes", "newton_tol"}, "numerics.");
    if (n.contains("fd_step")) cfg.numerics.fd_step = n["fd_step"].get<double>();
    if (n.contains("rk4_steps")) cfg.numerics.rk4_steps = n["rk4_steps"].get<int>();
    if (n.contains("quad_nodes")) cfg.numerics.quad_nodes = n["quad_nodes"].get<int>();
    if (n.contains("newton_tol")) cfg.numerics.newton_tol = n["newton_tol"].get<double>();
  }
  if (j.contains("domain")) {
    const auto& d = j["domain"];
    reject_unknown(d, {"radius", "samples", "seed"}, "domain.");
    if (d.contains("radius")) cfg.radius = d["radius"].get<double>();
    if (d.contains("samples")) cfg.points = d["samples"].get<int>();
    if (d.contains("seed")) cfg.seed = d["seed"].get<std::uint64_t>();
  }
  if (j.contains("experiment")) {
    const auto& e = j["experiment"];
    reject_unknown(e, {"name", "r1", "r2", "t_values", "tolerance"}, "experiment.");
    if (e.contains("name")) cfg.experiment = e["name"].get<std::string>();
    if (e.contains("r1")) cfg.r1 = e["r1"].get<double>();
    if (e.contains("r2")) cfg.r2 = e["r2"].get<double>();
    if (e.contains("t_values")) cfg.t_values = e["t_values"].get<std::vector<double>>();
    if (e.contains("tolerance")) cfg.tolerance = e["tolerance"].get<double>();
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    reject_unknown(o, {"dir", "csv"}, "output.");
    if (o.contains("dir")) cfg.out_dir = o["dir"].get<std::string>();
    if (o.contains("csv")) cfg.emit_csv = o["csv"].get<bool>();
  }
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();

  check_positive(cfg.numerics.fd_step, "numerics.fd_step");
  check_positive(cfg.numerics.rk4_steps, "numerics.rk4_steps");
  check_positive(cfg.numerics.quad_nodes, "numerics.quad_nodes");
  check_positive(cfg.numerics.newton_tol, "numerics.newton_tol");
  check_positive(cfg.radius, "domain.radius");
  if (cfg.radius > 0.5) throw InputError("config: domain.radius must be <= 0.5");
  if (cfg.points <= 0) throw InputError("config: domain.samples must be positive");
  return cfg;
}

Json RunConfig::to_json() const {
  Json j;
  if (!algebra_file.empty()) {
    j["algebra"] = Json{{"spec", algebra_file}, {"rep", rep_file}};
  } else {
    j["algebra"] = algebra;
  }
  j["numerics"] = Json{{"fd_step", numerics.fd_step},
                       {"rk4_steps", numerics.rk4_steps},
                       {"quad_nodes", numerics.quad_nodes},
                       {"newton_tol", numerics.newton_tol}};
  j["domain"] = Json{{"radius", radius}, {"samples", points}, {"seed", seed}};
  Json e;
  if (!experiment.empty()) e["name"] = experiment;
  e["r1"] = r1;
  e["r2"] = r2;
  e["t_values"] = t_values;
  if (tolerance > 0) e["tolerance"] = tolerance;
  j["experiment"] = e;
  if (!out_dir.empty() || emit_csv) j["output"] = Json{{"dir", out_dir}, {"csv", emit_csv}};
  if (threads > 0) j["threads"] = threads;
  return j;
}

ContextPtr RunConfig::make_context() const {
  if (!algebra_file.empty()) return load_context(algebra_file, rep_file);
  return builtin_context(algebra);
}

ExperimentParams RunConfig::params() const {
  ExperimentParams p;
  p.points = points;
  p.radius = radius;
  p.seed = seed;
  p.numerics = numerics;
  p.threads = threads;
  return p;
}

namespace {

int exit_code_for(const ExperimentReport& rep) { return rep.pass() ? 0 : 1; }

RunResult finish(const RunConfig& cfg, const ExperimentReport& rep,
                 const std::string& csv = {}) {
  RunResult out;
  out.exit_code = exit_code_for(rep);
  out.report_json = report_to_json(rep).dump(2) + "\n";
  out.csv = csv;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/report.json", out.report_json);
    if (!csv.empty()) write_text_file(cfg.out_dir + "/samples.csv", csv);
  }
  return out;
}

}  // namespace

RunResult run_check_algebra(const RunConfig& cfg) {
  ContextPtr ctx = cfg.make_context();
  ExperimentReport rep = check_algebra_suite(ctx, cfg.params());
  return finish(cfg, rep);
}

RunResult run_linearize(const RunConfig& cfg) {
  ContextPtr ctx = cfg.make_context();
  if (cfg.threads > 0) set_default_threads(cfg.threads);
  PipelineBundle pb = build_pipeline(ctx, cfg.numerics, cfg.radius, cfg.seed);
  double tol = cfg.tolerance > 0 ? cfg.tolerance : (ctx->n() > 4 ? 1e-4 : 1e-5);
  ExperimentReport rep = verify_linearization(pb, cfg.params(), tol);

  std::string csv;
  if (cfg.emit_csv) {
    // samples.csv v1: per sample point, chart coordinates of mu, Exp(mu),
    // F1(mu), and the Theorem-A pushforward residual at mu.
    std::ostringstream os;
    const int n = ctx->n();
    os << "# plgl samples v1: mu[0.." << n - 1 << "], exp_mu[0.." << n - 1
       << "], f1_mu[0.." << n - 1 << "], pushforward_residual\n";
    Rng rng(cfg.seed);
    os.precision(17);
    for (int k = 0; k < cfg.points; ++k) {
      Vec mu = rng.ball_point(n, cfg.radius);
      Vec em = pb.me->exp_chart(mu);
      Vec f1 = pb.flow->backward(mu);
      MapField L;
      L.dim_in = n;
      L.dim_out = n;
      L.fd_step = cfg.numerics.fd_step;
      L.eval = [&](const Vec& m) { return pb.me->exp_chart(pb.flow->backward(m)); };
      Mat push = pushforward(L, pb.pi_lp, mu);
      double resid = (push - pb.pi_star.eval(pb.me->exp_chart(f1))).cwiseAbs().maxCoeff();
      for (int i = 0; i < n; ++i) os << mu[i] << ",";
      for (int i = 0; i < n; ++i) os << em[i] << ",";
      for (int i = 0; i < n; ++i) os << f1[i] << ",";
      os << resid << "\n";
    }
    csv = os.str();
  }
  return finish(cfg, rep, csv);
}

RunResult run_verify(const RunConfig& cfg) {
  if (cfg.threads > 0) set_default_threads(cfg.threads);
  const std::string& ex = cfg.experiment;
  if (ex.empty())
    throw InputError("verify: an experiment name is required (--experiment)");

  ExperimentReport rep;
  if (ex == "scaling-laws") {
    std::string type = "su2";
    if (cfg.algebra == "su3-lu-weinstein") type = "su3";
    else if (cfg.algebra == "u2-lu-weinstein") type = "u2";
    else if (cfg.algebra != "su2-lu-weinstein")
      throw InputError("scaling-laws runs on Lu-Weinstein builtins");
    rep = scaling_laws_check(type, cfg.t_values, cfg.params(),
                             cfg.tolerance > 0 ? cfg.tolerance : 1e-5);
  } else if (ex == "orbit-product") {
    ContextPtr ctx = cfg.make_context();
    PipelineBundle pb = build_pipeline(ctx, cfg.numerics, cfg.radius, cfg.seed);
    rep = orbit_product_check(pb, cfg.r1, cfg.r2, cfg.params(),
                              cfg.tolerance > 0 ? cfg.tolerance : 1e-6);
  } else if (ex == "addmult") {
    ContextPtr ctx = cfg.make_context();
    ExperimentParams p = cfg.params();
    double tol = cfg.tolerance;
    if (tol <= 0) tol = (ctx->name() == "trivial-3d") ? 1e-10 : 1e-4;
    PipelineBundle pb = build_pipeline(ctx, cfg.numerics, std::max(0.2, cfg.radius), cfg.seed);
    rep = verify_addmult(pb, p, tol);
  } else if (ex == "functoriality") {
    MorphismBundle mb = u1_into_u2();
    rep = verify_functoriality(mb, cfg.params(),
                               cfg.tolerance > 0 ? cfg.tolerance : 1e-5);
  } else if (ex == "functoriality-identity") {
    MorphismBundle mb = identity_morphism(cfg.make_context());
    rep = verify_functoriality(mb, cfg.params(),
                               cfg.tolerance > 0 ? cfg.tolerance : 1e-10);
  } else if (ex == "linearize") {
    return run_linearize(cfg);
  } else {
    throw InputError("verify: unknown experiment '" + ex + "'");
  }
  return finish(cfg, rep);
}

RunResult run_command(const std::string& command, const RunConfig& cfg) {
  try {
    if (command == "check-algebra") return run_check_algebra(cfg);
    if (command == "linearize") return run_linearize(cfg);
    if (command == "verify") return run_verify(cfg);
    throw InputError("unknown command '" + command + "'");
  } catch (const InputError& e) {
    RunResult r;
    r.exit_code = 2;
    Json j;
    j["error"] = e.what();
    r.report_json = j.dump(2) + "\n";
    return r;
  } catch (const std::exception& e) {
    RunResult r;
    r.exit_code = 1;
    Json j;
    j["error"] = e.what();
    r.report_json = j.dump(2) + "\n";
    return r;
  }
}

RunResult run_command_json(const std::string& command, const std::string& config_json) {
  RunConfig cfg;
  try {
    Json j = config_json.empty() ? Json::object() : Json::parse(config_json);
    cfg = RunConfig::from_json(j);
  } catch (const InputError& e) {
    RunResult r;
    r.exit_code = 2;
    Json j;
    j["error"] = e.what();
    r.report_json = j.dump(2) + "\n";
    return r;
  } catch (const std::exception& e) {
    RunResult r;
    r.exit_code = 2;
    Json j;
    j["error"] = std::string("config: ") + e.what();
    r.report_json = j.dump(2) + "\n";
    return r;
  }
  return run_command(command, cfg);
}

}  // namespace plgl

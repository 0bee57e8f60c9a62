#include "plgl/plgl.h"

#include <string>

#include "core/runner.hpp"

struct plgl_session {
  std::string config_json;
  std::string report;
  std::string csv;
  std::string error;
  std::string builtins;
};

extern "C" {

plgl_session* plgl_session_new(void) { return new (std::nothrow) plgl_session(); }

void plgl_session_free(plgl_session* s) { delete s; }

plgl_status plgl_configure(plgl_session* s, const char* config_json) {
  if (!s) return PLGL_ERR_INPUT;
  std::string text = config_json ? config_json : "";
  try {
    if (!text.empty()) {
      plgl::Json j = plgl::Json::parse(text);
      (void)plgl::RunConfig::from_json(j);  // validate eagerly
    }
    s->config_json = text;
    s->error.clear();
    return PLGL_OK;
  } catch (const std::exception& e) {
    s->error = e.what();
    return PLGL_ERR_INPUT;
  }
}

plgl_status plgl_configure_file(plgl_session* s, const char* path) {
  if (!s) return PLGL_ERR_INPUT;
  try {
    plgl::Json j = plgl::load_json_file(path ? path : "");
    (void)plgl::RunConfig::from_json(j);
    s->config_json = j.dump();
    s->error.clear();
    return PLGL_OK;
  } catch (const std::exception& e) {
    s->error = e.what();
    return PLGL_ERR_INPUT;
  }
}

plgl_status plgl_run(plgl_session* s, const char* command) {
  if (!s || !command) return PLGL_ERR_INPUT;
  try {
    plgl::RunResult r = plgl::run_command_json(command, s->config_json);
    s->report = r.report_json;
    s->csv = r.csv;
    s->error.clear();
    if (r.exit_code == 2) {
      // surface the error text for callers that do not parse the report
      try {
        auto j = plgl::Json::parse(r.report_json);
        if (j.contains("error")) s->error = j["error"].get<std::string>();
      } catch (...) {
      }
      return PLGL_ERR_INPUT;
    }
    return r.exit_code == 0 ? PLGL_OK : PLGL_FAIL_TOLERANCE;
  } catch (const std::exception& e) {
    s->error = e.what();
    return PLGL_ERR_INTERNAL;
  }
}

const char* plgl_report_json(const plgl_session* s) {
  return (s && !s->report.empty()) ? s->report.c_str() : nullptr;
}

const char* plgl_samples_csv(const plgl_session* s) {
  return (s && !s->csv.empty()) ? s->csv.c_str() : nullptr;
}

const char* plgl_last_error(const plgl_session* s) {
  return (s && !s->error.empty()) ? s->error.c_str() : nullptr;
}

const char* plgl_builtins(plgl_session* s) {
  if (!s) return nullptr;
  plgl::Json j = plgl::Json::array();
  for (const auto& name : plgl::builtin_names()) j.push_back(name);
  s->builtins = j.dump();
  return s->builtins.c_str();
}

const char* plgl_version(void) { return "0.1.0"; }

}  // extern "C"

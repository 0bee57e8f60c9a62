/* plgl - Poisson linearization of dual Poisson-Lie groups.
 *
 * C API over the core library: opaque session handles, integer status codes,
 * JSON in / JSON out. Strings returned by the API stay owned by the session
 * and are valid until the next call on the same session.
 */
#ifndef PLGL_H
#define PLGL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum plgl_status {
  PLGL_OK = 0,             /* all checks passed */
  PLGL_FAIL_TOLERANCE = 1, /* ran, but a residual exceeded its tolerance */
  PLGL_ERR_INPUT = 2,      /* bad config, file, or algebra data */
  PLGL_ERR_INTERNAL = 3
} plgl_status;

typedef struct plgl_session plgl_session;

/* Session lifecycle. */
plgl_session* plgl_session_new(void);
void plgl_session_free(plgl_session* s);

/* Configuration: a JSON document (see README for the schema). Passing NULL
 * or "" selects the defaults. plgl_configure_file reads the JSON from disk. */
plgl_status plgl_configure(plgl_session* s, const char* config_json);
plgl_status plgl_configure_file(plgl_session* s, const char* path);

/* Commands: "check-algebra", "linearize", "verify". The status doubles as
 * the CLI exit code. */
plgl_status plgl_run(plgl_session* s, const char* command);

/* The report for the last run (JSON), the optional CSV sample table, and the
 * last error message. May return NULL when nothing is available. */
const char* plgl_report_json(const plgl_session* s);
const char* plgl_samples_csv(const plgl_session* s);
const char* plgl_last_error(const plgl_session* s);

/* Builtin algebra registry, as a JSON array of names. */
const char* plgl_builtins(plgl_session* s);

const char* plgl_version(void);

#ifdef __cplusplus
}
#endif

#endif /* PLGL_H */

/**
 * @file poroplate.h
 * @brief Public C API of the poroplate shared library.
 *
 * poroplate simulates a hinged poro-elastic plate on the unit square
 * coupled to a three-dimensional fluid pressure with transverse-only
 * diffusion, in a quasi-static or an inertial regime, and ships a built-in
 * verification engine exercising the solver's structural identities.
 *
 * Usage is session-based:
 *
 *   poroplate_session* s = NULL;
 *   if (poroplate_session_create_from_file(&s, "run.cfg") != POROPLATE_OK) {
 *     fprintf(stderr, "%s\n", poroplate_last_error());
 *     return 1;
 *   }
 *   poroplate_session_set_output_dir(s, "out");
 *   poroplate_session_set_override(s, "run.tau", "0.001");
 *   poroplate_status st = poroplate_session_run(s);
 *   fputs(poroplate_session_summary(s), stdout);
 *   int rc = poroplate_session_exit_code(s);
 *   poroplate_session_destroy(s);
 *
 * All functions return a status code; on failure a human-readable message
 * is available from poroplate_last_error() (thread-local) and, for
 * session-bound failures, poroplate_session_last_error(). Strings returned
 * by the library are owned by the library or the session and stay valid
 * until the next call on the same session (or library teardown); callers
 * must not free them.
 */

#ifndef POROPLATE_H
#define POROPLATE_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct poroplate_session poroplate_session;

typedef enum poroplate_status {
  POROPLATE_OK = 0,
  POROPLATE_ERR_INVALID_ARGUMENT = 1, /**< null pointers, bad call sequence */
  POROPLATE_ERR_PARSE = 2,            /**< configuration text unparsable */
  POROPLATE_ERR_SCHEMA = 3,           /**< configuration violates the schema */
  POROPLATE_ERR_VALIDATION = 4,       /**< physics inputs inadmissible */
  POROPLATE_ERR_SOLVER = 5,           /**< no convergence / singular block */
  POROPLATE_ERR_CHECK_FAILED = 6,     /**< a verification check failed */
  POROPLATE_ERR_IO = 7,               /**< file read/write failure */
  POROPLATE_ERR_INTERNAL = 8          /**< unexpected condition */
} poroplate_status;

/** Library semantic version, e.g. "1.0.0". */
const char* poroplate_version(void);

/** Stable name of a status code, e.g. "POROPLATE_ERR_PARSE". */
const char* poroplate_status_name(poroplate_status status);

/** Message for the most recent failure on this thread ("" if none). */
const char* poroplate_last_error(void);

/**
 * Create a session from a configuration file ("key = value" lines, '#'
 * comments). On success *out owns the session; destroy with
 * poroplate_session_destroy.
 */
poroplate_status poroplate_session_create_from_file(poroplate_session** out,
                                                    const char* config_path);

/** Create a session from configuration text instead of a file. */
poroplate_status poroplate_session_create_from_text(poroplate_session** out,
                                                    const char* config_text);

/**
 * Override one configuration key ("section.key" form) with a raw value
 * string. Overrides apply after file parsing and before validation, in the
 * order given. Must be called before poroplate_session_run.
 */
poroplate_status poroplate_session_set_override(poroplate_session* s,
                                                const char* key,
                                                const char* value);

/** Set the output directory (created if missing). Default "./out". */
poroplate_status poroplate_session_set_output_dir(poroplate_session* s,
                                                  const char* dir);

/** Nonzero silences informational output lines in the summary. */
poroplate_status poroplate_session_set_quiet(poroplate_session* s, int quiet);

/**
 * Execute the configured run (quasistatic, inertial, verify or
 * convergence mode). Writes output files into the output directory and
 * builds the text summary. Returns POROPLATE_OK also when verification
 * checks fail (inspect the exit code); hard errors return a failure
 * status.
 */
poroplate_status poroplate_session_run(poroplate_session* s);

/**
 * Process exit code the CLI maps the run result to:
 * 0 success, 1 solver error, 2 verification check failure,
 * 65 configuration parse/schema/validation error.
 */
int poroplate_session_exit_code(const poroplate_session* s);

/** Text summary of the run (check lines, timings, output inventory). */
const char* poroplate_session_summary(const poroplate_session* s);

/** Message of the last failure bound to this session ("" if none). */
const char* poroplate_session_last_error(const poroplate_session* s);

void poroplate_session_destroy(poroplate_session* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* POROPLATE_H */

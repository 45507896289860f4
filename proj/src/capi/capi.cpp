/**
 * @file capi.cpp
 * @brief C boundary of the poroplate library: sessions, status mapping,
 *        thread-local error reporting.
 *
 * A session holds the raw configuration pairs plus overrides; typing and
 * validation run inside poroplate_session_run so overrides can repair a
 * file that would not validate on its own. Every core exception type maps
 * to exactly one status code, and the session remembers the mapping as a
 * process exit code (65 for configuration problems, 1 for solver and I/O
 * failures, 2 for failed verification checks, 0 otherwise).
 */
#include "poroplate/poroplate.h"

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/driver.hpp"
#include "core/errors.hpp"

using namespace poroplate;

namespace {

thread_local std::string g_last_error;

int failure_exit_code(poroplate_status st) {
  switch (st) {
    case POROPLATE_ERR_PARSE:
    case POROPLATE_ERR_SCHEMA:
    case POROPLATE_ERR_VALIDATION:
      return 65;
    default:
      return 1;
  }
}

std::string read_file(const char* path) {
  std::FILE* f = std::fopen(path, "rb");
  if (!f) throw IoError(std::string("cannot open '") + path + "' for reading");
  std::string text;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0)
    text.append(buf, got);
  bool bad = std::ferror(f) != 0;
  std::fclose(f);
  if (bad) throw IoError(std::string("error reading '") + path + "'");
  return text;
}

}  // namespace

struct poroplate_session {
  std::vector<KeyValue> pairs;  ///< file pairs, then overrides in order
  std::string out_dir = "out";
  bool quiet = false;
  bool ran = false;
  int exit_code = 1;  ///< meaningful after run
  std::string summary;
  std::string last_error;
};

namespace {

poroplate_status fail(poroplate_session* s, poroplate_status st,
                      const std::string& message) {
  g_last_error = message;
  if (s) {
    s->last_error = message;
    s->exit_code = failure_exit_code(st);
  }
  return st;
}

/// Map a thrown core exception to (status, message). Ordered from most
/// to least specific.
poroplate_status classify(std::exception_ptr ep, std::string* message) {
  try {
    std::rethrow_exception(ep);
  } catch (const ParseError& e) {
    *message = e.what();
    return POROPLATE_ERR_PARSE;
  } catch (const SchemaError& e) {
    *message = e.what();
    return POROPLATE_ERR_SCHEMA;
  } catch (const NoConvergence& e) {
    *message = e.what();
    return POROPLATE_ERR_SOLVER;
  } catch (const SingularBlock& e) {
    *message = e.what();
    return POROPLATE_ERR_SOLVER;
  } catch (const StepError& e) {
    *message = e.what();
    return POROPLATE_ERR_SOLVER;
  } catch (const IoError& e) {
    *message = e.what();
    return POROPLATE_ERR_IO;
  } catch (const Error& e) {
    // Remaining core types flag inadmissible physics inputs: validation,
    // bounds/envelope violations, unsupported structures, size limits,
    // regularity requirements.
    *message = e.what();
    return POROPLATE_ERR_VALIDATION;
  } catch (const std::exception& e) {
    *message = e.what();
    return POROPLATE_ERR_INTERNAL;
  } catch (...) {
    *message = "unknown error";
    return POROPLATE_ERR_INTERNAL;
  }
}

poroplate_status create_session(poroplate_session** out,
                                const std::string& text) {
  *out = nullptr;
  auto session = new poroplate_session;
  try {
    session->pairs = parse_key_values(text);
  } catch (...) {
    std::string message;
    poroplate_status st = classify(std::current_exception(), &message);
    delete session;
    g_last_error = message;
    return st;
  }
  *out = session;
  g_last_error.clear();
  return POROPLATE_OK;
}

}  // namespace

extern "C" {

const char* poroplate_version(void) { return "1.0.0"; }

const char* poroplate_status_name(poroplate_status status) {
  switch (status) {
    case POROPLATE_OK: return "POROPLATE_OK";
    case POROPLATE_ERR_INVALID_ARGUMENT: return "POROPLATE_ERR_INVALID_ARGUMENT";
    case POROPLATE_ERR_PARSE: return "POROPLATE_ERR_PARSE";
    case POROPLATE_ERR_SCHEMA: return "POROPLATE_ERR_SCHEMA";
    case POROPLATE_ERR_VALIDATION: return "POROPLATE_ERR_VALIDATION";
    case POROPLATE_ERR_SOLVER: return "POROPLATE_ERR_SOLVER";
    case POROPLATE_ERR_CHECK_FAILED: return "POROPLATE_ERR_CHECK_FAILED";
    case POROPLATE_ERR_IO: return "POROPLATE_ERR_IO";
    case POROPLATE_ERR_INTERNAL: return "POROPLATE_ERR_INTERNAL";
  }
  return "POROPLATE_ERR_INTERNAL";
}

const char* poroplate_last_error(void) { return g_last_error.c_str(); }

poroplate_status poroplate_session_create_from_file(poroplate_session** out,
                                                    const char* config_path) {
  if (!out || !config_path)
    return fail(nullptr, POROPLATE_ERR_INVALID_ARGUMENT,
                "create_from_file: null argument");
  std::string text;
  try {
    text = read_file(config_path);
  } catch (const IoError& e) {
    *out = nullptr;
    g_last_error = e.what();
    return POROPLATE_ERR_IO;
  }
  return create_session(out, text);
}

poroplate_status poroplate_session_create_from_text(poroplate_session** out,
                                                    const char* config_text) {
  if (!out || !config_text)
    return fail(nullptr, POROPLATE_ERR_INVALID_ARGUMENT,
                "create_from_text: null argument");
  return create_session(out, config_text);
}

poroplate_status poroplate_session_set_override(poroplate_session* s,
                                                const char* key,
                                                const char* value) {
  if (!s || !key || !value)
    return fail(s, POROPLATE_ERR_INVALID_ARGUMENT,
                "set_override: null argument");
  if (s->ran)
    return fail(s, POROPLATE_ERR_INVALID_ARGUMENT,
                "set_override: session already ran");
  if (key[0] == '\0' || value[0] == '\0')
    return fail(s, POROPLATE_ERR_INVALID_ARGUMENT,
                "set_override: empty key or value");
  if (!is_known_key(key))
    return fail(s, POROPLATE_ERR_SCHEMA,
                std::string("unknown key '") + key + "'");
  s->pairs.push_back({key, value, 0});
  return POROPLATE_OK;
}

poroplate_status poroplate_session_set_output_dir(poroplate_session* s,
                                                  const char* dir) {
  if (!s || !dir || dir[0] == '\0')
    return fail(s, POROPLATE_ERR_INVALID_ARGUMENT,
                "set_output_dir: null or empty argument");
  s->out_dir = dir;
  return POROPLATE_OK;
}

poroplate_status poroplate_session_set_quiet(poroplate_session* s, int quiet) {
  if (!s)
    return fail(s, POROPLATE_ERR_INVALID_ARGUMENT, "set_quiet: null session");
  s->quiet = quiet != 0;
  return POROPLATE_OK;
}

poroplate_status poroplate_session_run(poroplate_session* s) {
  if (!s)
    return fail(s, POROPLATE_ERR_INVALID_ARGUMENT, "run: null session");
  try {
    RunConfig config = make_run_config(s->pairs);
    DriverResult result = run_driver(config, s->out_dir, s->quiet);
    s->summary = result.summary;
    s->exit_code = result.exit_code;
    s->ran = true;
    s->last_error.clear();
    g_last_error.clear();
    return POROPLATE_OK;
  } catch (...) {
    std::string message;
    poroplate_status st = classify(std::current_exception(), &message);
    return fail(s, st, message);
  }
}

int poroplate_session_exit_code(const poroplate_session* s) {
  return s ? s->exit_code : 1;
}

const char* poroplate_session_summary(const poroplate_session* s) {
  return s ? s->summary.c_str() : "";
}

const char* poroplate_session_last_error(const poroplate_session* s) {
  return s ? s->last_error.c_str() : "";
}

void poroplate_session_destroy(poroplate_session* s) { delete s; }

}  // extern "C"

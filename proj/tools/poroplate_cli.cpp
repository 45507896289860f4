/**
 * @file poroplate_cli.cpp
 * @brief Command-line driver for the poroplate shared library.
 *
 * Usage:
 *   poroplate --config PATH [--out DIR] [--override key=value ...] [--quiet]
 *
 * Exit codes: 0 success; 1 solver error; 2 verification check failure;
 * 64 usage error; 65 configuration error.
 */

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "poroplate/poroplate.h"

namespace {

constexpr int kExitUsage = 64;

void print_usage(std::FILE* to) {
  std::fputs(
      "usage: poroplate --config PATH [--out DIR] [--override key=value ...]"
      " [--quiet]\n"
      "\n"
      "  --config PATH          configuration file (required)\n"
      "  --out DIR              output directory (default: ./out)\n"
      "  --override key=value   override a configuration key; repeatable,\n"
      "                         applied in order after the file is parsed\n"
      "  --quiet                suppress informational output\n"
      "  --version              print the library version and exit\n"
      "  --help                 print this message and exit\n",
      to);
}

int map_failure_exit(poroplate_status st) {
  switch (st) {
    case POROPLATE_ERR_PARSE:
    case POROPLATE_ERR_SCHEMA:
    case POROPLATE_ERR_VALIDATION:
      return 65;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool quiet = false;

  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    auto need_value = [&](const char* flag) -> const char* {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "poroplate: %s requires a value\n", flag);
        print_usage(stderr);
        std::exit(kExitUsage);
      }
      return argv[++i];
    };
    if (arg == "--config") {
      config_path = need_value("--config");
    } else if (arg == "--out") {
      out_dir = need_value("--out");
    } else if (arg == "--override") {
      overrides.push_back(need_value("--override"));
    } else if (arg == "--quiet") {
      quiet = true;
    } else if (arg == "--version") {
      std::printf("poroplate %s\n", poroplate_version());
      return 0;
    } else if (arg == "--help" || arg == "-h") {
      print_usage(stdout);
      return 0;
    } else {
      std::fprintf(stderr, "poroplate: unknown argument '%s'\n", arg.c_str());
      print_usage(stderr);
      return kExitUsage;
    }
  }

  if (config_path.empty()) {
    std::fprintf(stderr, "poroplate: --config is required\n");
    print_usage(stderr);
    return kExitUsage;
  }

  poroplate_session* session = nullptr;
  poroplate_status st =
      poroplate_session_create_from_file(&session, config_path.c_str());
  if (st != POROPLATE_OK) {
    std::fprintf(stderr, "poroplate: %s: %s\n", poroplate_status_name(st),
                 poroplate_last_error());
    return map_failure_exit(st);
  }

  for (const std::string& ov : overrides) {
    std::size_t eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "poroplate: --override expects key=value, got '%s'\n",
                   ov.c_str());
      poroplate_session_destroy(session);
      return kExitUsage;
    }
    std::string key = ov.substr(0, eq);
    std::string value = ov.substr(eq + 1);
    st = poroplate_session_set_override(session, key.c_str(), value.c_str());
    if (st != POROPLATE_OK) {
      std::fprintf(stderr, "poroplate: %s: %s\n", poroplate_status_name(st),
                   poroplate_session_last_error(session));
      poroplate_session_destroy(session);
      return map_failure_exit(st);
    }
  }

  if (!out_dir.empty()) {
    st = poroplate_session_set_output_dir(session, out_dir.c_str());
    if (st != POROPLATE_OK) {
      std::fprintf(stderr, "poroplate: %s: %s\n", poroplate_status_name(st),
                   poroplate_session_last_error(session));
      poroplate_session_destroy(session);
      return map_failure_exit(st);
    }
  }
  poroplate_session_set_quiet(session, quiet ? 1 : 0);

  st = poroplate_session_run(session);
  if (st != POROPLATE_OK) {
    std::fprintf(stderr, "poroplate: %s: %s\n", poroplate_status_name(st),
                 poroplate_session_last_error(session));
    int rc = map_failure_exit(st);
    poroplate_session_destroy(session);
    return rc;
  }

  const char* summary = poroplate_session_summary(session);
  if (summary && summary[0] != '\0') std::fputs(summary, stdout);

  int rc = poroplate_session_exit_code(session);
  poroplate_session_destroy(session);
  return rc;
}

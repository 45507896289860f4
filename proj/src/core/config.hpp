#pragma once
/**
 * @file config.hpp
 * @brief Run configuration: a flat "key = value" document with '#'
 *        comments, typed into RunConfig with defaults, overrides, schema
 *        validation, and a deterministic echo that round-trips.
 *
 * Parsing happens in two stages. parse_key_values turns text into an
 * ordered key/value list and reports malformed lines as ParseError with
 * the 1-based line number. make_run_config types and validates the pairs
 * (after any overrides are appended) and reports offending keys as
 * SchemaError. Later assignments to the same key win, which is exactly
 * how --override works: overrides are appended after the file's pairs and
 * before typing.
 *
 * echo_config renders the complete effective configuration — every key,
 * defaults included — with %.17g numbers, so parsing the echo reproduces
 * an identical RunConfig and identical downstream output bytes.
 */

#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/model.hpp"
#include "core/operators.hpp"

namespace poroplate {

enum class RunMode { Quasistatic, Inertial, Verify, Convergence };

struct RunConfig {
  RunMode mode = RunMode::Quasistatic;

  // Physical constants.
  double D = 1.0;
  double alpha = 0.7;
  double c_p = 1.0;
  double rho_p = 1.0;  ///< used by the inertial mode only
  double h = 0.5;

  // Discretization.
  int M = 2;
  int N = 2;
  int N3 = 33;

  // Time marching.
  double T = 1.0;
  double tau = 0.01;

  // Permeability preset: "constant" | "sin-in-time" | "layered-x3".
  std::string k_preset = "constant";
  double k_base = 1.0;    ///< constant value, or sin-in-time base
  double k_amp = 0.0;     ///< sin-in-time amplitude
  double k_omega = 1.0;   ///< sin-in-time angular frequency
  double k_bottom = 1.0;  ///< layered-x3 lower-half value
  double k_top = 1.0;     ///< layered-x3 upper-half value

  // Data presets: sources "zero" | "manufactured"; initial data
  // "zero" | "profile" | "random" | "manufactured", given as fluid
  // content or as pressure.
  std::string source_preset = "zero";
  std::string initial_preset = "profile";
  std::string initial_kind = "content";  ///< "content" | "pressure"

  // Inertial-mode choices.
  std::string scheme = "backward-euler";  ///< | "crank-nicolson"
  std::string d0_convention = "velocity"; ///< | "displacement"

  // Numerics.
  double cg_tol = 1e-10;
  unsigned long long seed = 1;

  /// Write a full field snapshot every this many steps (0 = final only).
  int snapshot_every = 0;

  bool operator==(const RunConfig&) const = default;
};

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;  ///< 1-based source line, 0 for overrides
};

/// Stage 1: split a document into ordered pairs. Malformed non-empty,
/// non-comment lines raise ParseError carrying the line number.
std::vector<KeyValue> parse_key_values(const std::string& text);

/// Whether `key` is in the schema (used to reject override typos early).
bool is_known_key(const std::string& key);

/// Stage 2: type and validate pairs (later assignments win). Unknown keys,
/// non-numeric values, out-of-range constants and unknown preset names
/// raise SchemaError naming the key.
RunConfig make_run_config(const std::vector<KeyValue>& pairs);

/// Convenience: both stages on a raw document.
RunConfig parse_config(const std::string& text);

/// Deterministic full rendering; parse_config(echo_config(c)) == c.
std::string echo_config(const RunConfig& config);

/// %.17g rendering shared by the echo and the CSV writers.
std::string format_double(double v);

// --- realization of a configuration into solver inputs ---------------------

/// Permeability model for the configured preset (bounds and envelope
/// declared per preset; sin-in-time uses the configured T).
PermeabilityModel configured_permeability(const RunConfig& config);

/// Operator context for the configured constants, grids and permeability.
OperatorContext make_configured_context(const RunConfig& config);

/// Sources for the configured preset. "manufactured" pairs the mode with
/// its closed-form case (quasi-static decay or the inertial travelling
/// solution); "zero" leaves both callbacks empty.
SourceTerms configured_sources(const RunConfig& config,
                               const OperatorContext& ctx);

/// Initial data for the configured preset, seeded for "random".
InitialData configured_initial(const RunConfig& config,
                               const OperatorContext& ctx);

}  // namespace poroplate

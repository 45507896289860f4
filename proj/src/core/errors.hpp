#pragma once
/**
 * @file errors.hpp
 * @brief Exception taxonomy for the poroplate core.
 *
 * The core throws; the C API boundary catches and maps each type to a
 * status code. Every exception carries a human-readable message; a few
 * carry structured context (iteration counts, line numbers, mode indices)
 * that callers surface in diagnostics.
 */

#include <stdexcept>
#include <string>

namespace poroplate {

/// Base class for every error raised by the core library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested discretization exceeds configured size limits.
struct SizeError : Error {
  using Error::Error;
};

/// A sampled coefficient left its declared admissible interval.
struct BoundsViolation : Error {
  using Error::Error;
};

/// A sampled time derivative exceeded its declared envelope.
struct EnvelopeViolation : Error {
  using Error::Error;
};

/// Permeability evaluation failed (non-finite value) at a quadrature point.
struct PermeabilityEvalError : Error {
  using Error::Error;
};

/// A permeability structure tag the operator assembly does not support.
struct UnsupportedPermeability : Error {
  using Error::Error;
};

/// Inputs rejected at a solver entry point (non-positive constants,
/// mismatched field shapes, missing initial data).
struct ValidationError : Error {
  using Error::Error;
};

/// Iterative solve exhausted its iteration cap before reaching tolerance.
struct NoConvergence : Error {
  NoConvergence(const std::string& what, int iterations_, double residual_)
      : Error(what), iterations(iterations_), residual(residual_) {}
  int iterations;
  double residual;
};

/// A time step failed; message names the step index and inner failure.
struct StepError : Error {
  using Error::Error;
};

/// Input series too short (or otherwise too rough) to difference in time.
struct RegularityError : Error {
  using Error::Error;
};

/// A per-mode resolvent block was numerically singular.
struct SingularBlock : Error {
  SingularBlock(const std::string& what, int m_, int n_)
      : Error(what), m(m_), n(n_) {}
  int m;
  int n;
};

/// Configuration text failed to parse; `line` is 1-based.
struct ParseError : Error {
  ParseError(const std::string& what, int line_) : Error(what), line(line_) {}
  int line;
};

/// Configuration parsed but violates the schema; `key` names the offender.
struct SchemaError : Error {
  SchemaError(const std::string& what, std::string key_)
      : Error(what), key(std::move(key_)) {}
  std::string key;
};

/// Filesystem or stream failure while reading inputs or writing outputs.
struct IoError : Error {
  using Error::Error;
};

}  // namespace poroplate

#pragma once
/**
 * @file model.hpp
 * @brief Physical data of the poro-elastic plate problem: material
 *        constants, permeability models, source terms, initial data, and
 *        their validation.
 *
 * Conventions: the plate occupies (0,1)^2, the fluid layer (0,1)^2 x (-h,h).
 * Admissibility asks for D, alpha, h > 0 and c_p, rho_p >= 0; the
 * quasi-static solver additionally requires c_p > 0, the inertial solver
 * rho_p > 0. The derived coupling beta = alpha^2 / D is stored at
 * construction and re-derived during validation so that hand-assembled
 * parameter structs with an inconsistent beta are rejected.
 *
 * Permeability k(x, t) must stay inside declared bounds
 * 0 < kmin <= k <= kmax at every quadrature point; when k depends on time,
 * an envelope function K(t) >= |dk/dt| must be declared. Both properties
 * are sampled by validate_permeability() and asserted again at every
 * stiffness assembly.
 */

#include <functional>
#include <string>
#include <vector>

#include "core/discretization.hpp"
#include "core/errors.hpp"

namespace poroplate {

struct PhysicalParams {
  double D = 1.0;      ///< plate flexural rigidity
  double alpha = 1.0;  ///< pressure-displacement coupling
  double c_p = 1.0;    ///< fluid compressibility
  double rho_p = 0.0;  ///< plate areal density (inertial runs only)
  double h = 0.5;      ///< fluid layer half-thickness
  double beta = 1.0;   ///< derived: alpha^2 / D

  /// Build with beta derived from (D, alpha).
  static PhysicalParams create(double D, double alpha, double c_p,
                               double rho_p, double h);
};

struct ValidationIssue {
  std::string name;
  bool pass = true;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> items;
  double observed_min = 0.0;  ///< permeability checks: min sampled value
  double observed_max = 0.0;  ///< permeability checks: max sampled value

  bool all_pass() const;
  void add(const std::string& name, bool pass, const std::string& message);
};

/// Check admissibility of the constants; report-based (never throws).
ValidationReport validate_params(const PhysicalParams& p);

/// Structural hint the operator assembly uses to pick its evaluation path.
enum class PermeabilityStructure {
  Constant,        ///< k independent of space and time
  TransverseOnly,  ///< k = k(x3, t): one stiffness shared by all modes
  General,         ///< k = k(x1, x2, x3, t): per-collocation-point stiffness
};

/**
 * @brief Permeability coefficient with declared bounds and time envelope.
 *
 * `evaluate(x1, x2, x3, t)` must be pointwise evaluable at arbitrary
 * quadrature points. `dt_envelope` may be empty for time-independent
 * models; time-dependent models must declare it together with its interval
 * integral over the run horizon (used in stability reporting).
 */
struct PermeabilityModel {
  std::string name = "constant";
  std::function<double(double, double, double, double)> evaluate;
  double k_lower = 1.0;  ///< declared lower bound kmin > 0
  double k_upper = 1.0;  ///< declared upper bound kmax >= kmin
  std::function<double(double)> dt_envelope;  ///< K(t) >= |dk/dt|, may be empty
  double dt_envelope_integral = 0.0;          ///< declared int_0^T K(t) dt
  PermeabilityStructure structure = PermeabilityStructure::Constant;
};

/// Spatial sampling resolution used by validate_permeability.
struct GridSpec {
  int M = 4;
  int N = 4;
  int N3 = 17;
};

/**
 * @brief Sample a permeability model over a space-time grid and check its
 *        declared properties.
 *
 * Samples nodes and interval midpoints in x3 at the collocation points of
 * `spec`, crossed with `time_samples` uniform times in [0, T] (one sample
 * for time-independent models). Returns a report carrying the observed
 * min/max. Throws BoundsViolation if any sample leaves
 * [k_lower, k_upper], EnvelopeViolation if a centered difference quotient
 * in time exceeds dt_envelope at a sample point, and
 * PermeabilityEvalError for non-finite samples.
 */
ValidationReport validate_permeability(const PermeabilityModel& k,
                                       const GridSpec& spec, double h,
                                       double T, int time_samples = 64);

// --- Permeability presets -------------------------------------------------

/// k == k0; bounds [k0, k0].
PermeabilityModel permeability_constant(double k0);

/// k(t) = base + amp * sin(omega t); requires base > |amp| > 0.
/// Bounds [base - |amp|, base + |amp|], envelope K(t) = |amp * omega|.
PermeabilityModel permeability_sin_in_time(double base, double amp,
                                           double omega, double T);

/// Two-layer profile in the thickness: k = k_bottom for x3 < 0, k_top for
/// x3 > 0 (mean at the interface); time-independent.
PermeabilityModel permeability_layered_x3(double k_bottom, double k_top);

// --- Sources and initial data ---------------------------------------------

/**
 * @brief Plate load f(x1,x2,t) and fluid source g(x,t), delivered directly
 *        as modal fields so that single-mode analytic data stays exact.
 *
 * Null callbacks mean identically zero. `f_time_differentiable` declares
 * that f admits the time-difference quotients the load-translation path
 * takes.
 */
struct SourceTerms {
  std::function<void(const SineBasis&, double, PlateField&)> plate_load;
  std::function<void(const SineBasis&, const TransverseGrid&, double,
                     PressureField&)>
      fluid_source;
  bool f_time_differentiable = true;
};

/// Evaluate the plate load at time t (zero field if no callback).
PlateField eval_plate_load(const SourceTerms& s, const SineBasis& basis,
                           double t);
/// Evaluate the fluid source at time t (zero field if no callback).
PressureField eval_fluid_source(const SourceTerms& s, const SineBasis& basis,
                                const TransverseGrid& grid, double t);

/// What the pressure-shaped payload of InitialData means.
enum class InitialKind {
  FluidContent,  ///< d0: initial content zeta(0); p(0) solved from it
  Pressure,      ///< p0 given directly
};

/**
 * @brief Initial data. Quasi-static runs use (kind, field); inertial runs
 *        additionally take plate displacement w0 and velocity w1.
 */
struct InitialData {
  InitialKind kind = InitialKind::FluidContent;
  PressureField field;  ///< d0 or p0, modal layout
  PlateField w0;        ///< inertial only
  PlateField w1;        ///< inertial only
};

/// Spot-check sources for finiteness at a few times; throws ValidationError.
void validate_sources(const SourceTerms& s, const SineBasis& basis,
                      const TransverseGrid& grid, double T);

}  // namespace poroplate

#pragma once
/**
 * @file verify.hpp
 * @brief Self-contained verification suites with machine-checkable pass
 *        bounds, plus the closed-form cases and study helpers they use.
 *
 * Each suite pins its own configuration (sizes, parameters, seeds) so a
 * run is deterministic, and reports one CheckResult per property with the
 * measured value and the bound it was held against. format_check renders
 * the canonical one-line form
 *
 *     CHECK <suite>.<name> PASS|FAIL <value> <bound>
 *
 * consumed by the acceptance harness and surfaced through the library
 * summary. Suites never throw for a failed bound — they record it — but a
 * suite that hits an unexpected exception appends a failed "exception"
 * entry carrying no value.
 */

#include <functional>
#include <string>
#include <vector>

#include "core/inertial.hpp"
#include "core/model.hpp"
#include "core/operators.hpp"
#include "core/quasistatic.hpp"

namespace poroplate {

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
};

struct CheckList {
  std::vector<CheckResult> checks;

  bool all_pass() const;
  /// Convenience: record `value` against an upper bound (pass iff
  /// value <= bound).
  void add_upper(const std::string& suite, const std::string& name,
                 double value, double bound);
  /// Record `value` against a lower bound (pass iff value >= bound).
  void add_lower(const std::string& suite, const std::string& name,
                 double value, double bound);
  /// Record `value` against a two-sided window |value - center| <= radius.
  void add_window(const std::string& suite, const std::string& name,
                  double value, double center, double radius);
  void append(const CheckList& other);
};

std::string format_check(const CheckResult& c);

/**
 * @brief Closed-form separable solution of the quasi-static system:
 *        p = exp(-sigma t) cos(pi (x3 + h) / (2h)) phi_mn, zero plate
 *        load, fluid source chosen so the pair solves the system with
 *        k(t) = k_base + k_amp sin(k_omega t).
 */
struct ManufacturedQS {
  int m = 1, n = 1;
  double sigma = 1.0;
  double h = 0.5;
  double kappa = 0.0;  ///< transverse moment of the profile, -8 h^2 / pi^2
  double k_base = 1.0, k_amp = 0.0, k_omega = 0.0;

  double profile(double x3) const;
  double k_at(double t) const;
  /// Matching permeability preset (constant for k_amp = 0).
  PermeabilityModel permeability(double T) const;
  SourceTerms sources(const PhysicalParams& params) const;
  InitialData initial(const OperatorContext& ctx) const;
  PressureField exact_pressure(const OperatorContext& ctx, double t) const;
  double exact_w_coef(const OperatorContext& ctx, double t) const;
  /// Relative weighted-l2 error of a computed pressure at time t.
  double pressure_error(const OperatorContext& ctx, const PressureField& p,
                        double t) const;
};

ManufacturedQS manufactured_qs_case(double h, double sigma = 1.0,
                                    double k_base = 1.0, double k_amp = 0.0,
                                    double k_omega = 0.0);

/**
 * @brief Closed-form solution for the regime with plate inertia:
 *        w = A cos(omega t) phi_mn, p = exp(-mu t) cos(pi (x3+h)/(2h))
 *        phi_mn, with plate load and fluid source matched to the physical
 *        system (constant unit permeability).
 */
struct ManufacturedInertial {
  int m = 1, n = 1;
  double A = 1.0, omega = 2.0, mu = 1.0;
  double h = 0.5;
  double kappa = 0.0;

  double profile(double x3) const;
  SourceTerms sources(const PhysicalParams& params) const;
  InitialData initial(const OperatorContext& ctx) const;
  /// tau-weighted l2-in-time trajectory error against the closed form.
  double trajectory_error(const OperatorContext& ctx,
                          const InertialRun& run) const;
};

ManufacturedInertial manufactured_inertial_case(double h, double A = 1.0,
                                                double omega = 2.0,
                                                double mu = 1.0);

/// Least-squares slope of log(err) against log(scale).
double fit_log_slope(const std::vector<double>& scale,
                     const std::vector<double>& err);

struct ConvergenceStudy {
  std::vector<double> scales;  ///< tau or transverse step
  std::vector<double> errors;  ///< relative errors at the final time
  double observed_order = 0.0;
};

/// Final-time pressure error of the manufactured quasi-static case across
/// a tau ladder at fixed transverse resolution.
ConvergenceStudy qs_time_convergence(const std::vector<double>& taus, int N3,
                                     double T);
/// Same across a transverse ladder at fixed tau.
ConvergenceStudy qs_space_convergence(const std::vector<int>& n3s, double tau,
                                      double T);

struct StabilityLadder {
  std::vector<StabilityReport> rungs;
  double spread = 0.0;  ///< max ratio / min ratio across rungs
};

/// Continuous-dependence ratio across simultaneous (tau, N3) refinement
/// with fixed smooth data.
StabilityLadder stability_ladder();

// --- verification suites -------------------------------------------------

CheckList verify_operator_identities();    ///< adjointness, symmetry, diagram
CheckList verify_coercivity();             ///< diffusion form vs declared floor
CheckList verify_dense_oracle();           ///< matrix-free vs dense solves
CheckList verify_qs_convergence();         ///< observed orders in tau and dx
CheckList verify_energy_monotonicity();    ///< long zero-source runs
CheckList verify_dissipativity();          ///< generator sign identity
CheckList verify_weak_residual();          ///< a-posteriori residual decay
CheckList verify_stability_ladder();       ///< data-norm ratio stability
CheckList verify_initial_equivalence();    ///< d0 <-> p(0) round trips
CheckList verify_translation_equivalence();///< direct vs translated runs

/// All suites in canonical order.
CheckList verify_all();

}  // namespace poroplate

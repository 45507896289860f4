#pragma once
/**
 * @file quasistatic.hpp
 * @brief Implicit time stepping for the quasi-static regime, where the
 *        plate is algebraically slaved to the pressure.
 *
 * State of the evolution is the pressure p; the plate displacement w is
 * recovered each step from the plate solve, and the fluid content
 *
 *     zeta = (c_p I + B) p + G f,      (G f)_mode,j = alpha x3_j fhat/(D lambda)
 *
 * evolves by the degenerate parabolic law  d/dt zeta + A(t) p = g  with
 * initial content zeta(0) = d0. Backward Euler gives the per-step solve
 *
 *   (c_p I + B + tau A(t_{n+1})) p_{n+1}
 *       = (c_p I + B) p_n + tau g_{n+1} + G f_n - G f_{n+1},
 *
 * a self-adjoint positive-definite system handled by weighted conjugate
 * gradients, warm-started from p_n. For vanishing sources the content
 * energy ((c_p I + B) p, p) is non-increasing step to step; the runner
 * monitors this and can assert it.
 *
 * The load-translation path eliminates f by shifting the displacement by
 * the pure-load solve w_f = (D Lap^2)^{-1} f and compensating in g and d0;
 * with per-step backward difference quotients for d/dt w_f the translated
 * scheme is algebraically identical to the direct one, which is exactly
 * what the translation-equivalence verification checks.
 */

#include <functional>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/operators.hpp"

namespace poroplate {

struct QSState {
  double t = 0.0;
  PressureField p;     ///< modal pressure
  PlateField w;        ///< plate displacement
  PressureField zeta;  ///< fluid content (recomputable from p, w)
  double energy = 0.0; ///< ((c_p I + B) p, p)
  int cg_iterations = 0;
  double cg_residual = 0.0;
};

enum class EnergyAssert { Auto, On, Off };

struct QSOptions {
  CgOptions cg;                    ///< per-step linear solver control
  EnergyAssert assert_energy = EnergyAssert::Auto;
  bool store_trajectory = true;    ///< keep every state (else final only)
  std::function<void(const QSState&)> observer;  ///< called per state
};

struct QSRun {
  std::vector<QSState> states;  ///< all states, or just the last one
  double tau = 0.0;
  double T = 0.0;
  PressureField d0_effective;   ///< content at t=0 (given or reconstructed)
  double energy_initial = 0.0;
  /// max over steps of (E_{n+1} - E_n) / max(E_0, eps); <= solver noise
  /// for zero sources.
  double max_energy_increase = 0.0;
  /// max over steps of the modal plate equation residual, relative.
  double max_plate_residual = 0.0;
  long total_cg_iterations = 0;
  std::string path = "direct";  ///< "direct" or "translated"
};

/// Lift of a plate load into content space: (G f)_mode,j = alpha x3 fhat /
/// (D lambda). Appears in the content identity and the translation path.
PressureField load_content_lift(const OperatorContext& ctx, const PlateField& f);

/// Initial state: p(0) from d0 via content inversion (kind FluidContent)
/// or given directly (kind Pressure); w(0) and zeta(0) derived.
QSState qs_initial_state(const OperatorContext& ctx, const InitialData& init,
                         const SourceTerms& sources, const QSOptions& opts = {});

/// One backward-Euler step from `state` to t + tau. f_prev is the load at
/// state.t, f_next / g_next at t + tau. Throws StepError on solver failure.
QSState qs_step(const OperatorContext& ctx, const QSState& state, double tau,
                const PressureField& g_next, const PlateField& f_next,
                const PlateField& f_prev, const QSOptions& opts = {});

/// Run from t=0 to T in round(T/tau) backward-Euler steps; T must be an
/// integer multiple of tau (to 1e-8 relative).
QSRun qs_run(const OperatorContext& ctx, const InitialData& init,
             const SourceTerms& sources, double T, double tau,
             const QSOptions& opts = {});

/// Same trajectory through the load-translation route: f is eliminated,
/// the homogeneous system runs with corrected g and d0, and w is
/// reconstructed as u + w_f.
QSRun qs_run_translated(const OperatorContext& ctx, const InitialData& init,
                        const SourceTerms& sources, double T, double tau,
                        const QSOptions& opts = {});

struct TranslationResult {
  std::vector<PlateField> w_f;             ///< pure-load solves at t_0..t_N
  std::vector<PressureField> g_correction; ///< index n: correction at t_n
                                           ///< (index 0 unused, zero)
  PressureField d0_correction;             ///< add to d0
};

/// Build the translation data from a load series sampled at uniform step
/// times. Throws RegularityError for series shorter than two samples.
TranslationResult translate_source(const OperatorContext& ctx,
                                   const std::vector<PlateField>& f_series,
                                   double tau);

struct ResidualRow {
  std::string name;          ///< test function label "mode(m,n) Q psi"
  double plate_residual;     ///< normalized; machine-level by construction
  double pressure_residual;  ///< normalized; O(tau + dx^2)
};

struct ResidualReport {
  std::vector<ResidualRow> rows;
  double max_plate_residual = 0.0;
  double max_pressure_residual = 0.0;
};

/**
 * @brief A-posteriori weak-form residual of a stored trajectory against a
 *        bank of separable test functions psi(t) Q(x3) phi_mn with
 *        psi(T) = 0.
 *
 * Uses trapezoid-in-time quadrature, analytic psi' and analytic Q' at the
 * transverse interval midpoints — deliberately NOT the scheme's own
 * quadrature — so the residual decays at first order in tau and second
 * order in the transverse step instead of sitting at roundoff. Requires a
 * stored trajectory and an in-plane-independent permeability.
 */
ResidualReport weak_residual(const OperatorContext& ctx, const QSRun& run,
                             const SourceTerms& sources);

struct StabilityReport {
  double lhs = 0.0;        ///< tau sum (|p|_V^2 + |w|_W^2)
  double rhs = 0.0;        ///< data norm: |f|_{H1(W')}^2 + |g|_{L2(V')}^2 + |d0|^2
  double ratio = 0.0;      ///< lhs / rhs
  double f_part = 0.0, g_part = 0.0, d0_part = 0.0;
};

/// Discrete version of the continuous-dependence bound: trajectory norm
/// against the data norm. Finite ratio, stable under refinement.
StabilityReport stability_report(const OperatorContext& ctx, const QSRun& run,
                                 const SourceTerms& sources);

}  // namespace poroplate

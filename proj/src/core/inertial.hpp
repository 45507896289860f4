#pragma once
/**
 * @file inertial.hpp
 * @brief First-order evolution for the regime with plate inertia, run in a
 *        nondimensional frame where the generator is exactly dissipative.
 *
 * With sigma = sqrt(rho_p / D), b = sqrt(D / c_p), a_c = alpha / sqrt(c_p D)
 * and the substitutions
 *
 *     t = sigma * t~,   w = w~,   w_t = v~ / sigma,   p = b * p~,
 *     k~(t~) = (sigma / c_p) k(sigma t~),
 *     f~ = f(sigma t~) / D,   g~ = (sigma / (c_p b)) g(sigma t~),
 *
 * the system becomes, per in-plane mode (Laplacian -> -lambda),
 *
 *     w^' = v^
 *     v^' = -lambda^2 w^ + a_c lambda (K p^) + f~^
 *     p^' = -a_c lambda x3 v^ - W^{-1} S(t~) p^ + g~^
 *
 * where K is the transverse moment and S the flux-form stiffness built from
 * k~. In the state norm |y|_X^2 = sum lambda^2 w^2 + sum v^2 + |p|_h^2 the
 * homogeneous generator satisfies (A y, y)_X = -(k~ d3 p, d3 p) <= 0: the
 * two coupling terms cancel exactly because the moment weights used by K
 * are the same ones that weight the pressure inner product. Implicit Euler
 * therefore contracts |.|_X for zero sources, step by step.
 *
 * The resolvent (I - h A(t~))^{-1} decouples into one (1 + N3) x (1 + N3)
 * block per mode after eliminating v^ = (w^ - r1) / h:
 *
 *     [ 1 + h^2 lambda^2   -h^2 a_c lambda m^T ] [w^]   [ r1 + h r2      ]
 *     [ a_c lambda m        W + h S            ] [p^] = [ W r3 + a_c lambda m r1 ]
 *
 * with m the moment-weight vector. Blocks are LU-factored densely; a
 * post-solve residual above 1e-8 relative raises SingularBlock.
 *
 * Physical quantities go in and come out; the rescaled frame is internal
 * but exposed (rescaled_frame, to_rescaled, to_physical, InertialVector)
 * so the generator's algebra can be tested directly.
 */

#include <functional>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/operators.hpp"
#include "core/quasistatic.hpp"  // EnergyAssert

#include <Eigen/Dense>

namespace poroplate {

/// Scaling constants tying the physical and nondimensional frames.
struct RescaledFrame {
  double sigma;  ///< time unit, sqrt(rho_p / D)
  double b;      ///< pressure unit, sqrt(D / c_p)
  double a_c;    ///< symmetric coupling strength, alpha / sqrt(c_p D)
};

RescaledFrame rescaled_frame(const PhysicalParams& params);

/// Stacked nondimensional state (w^, v^ modal scalars; p~ modal field).
struct InertialVector {
  std::vector<double> w;  ///< one coefficient per mode
  std::vector<double> v;  ///< one coefficient per mode
  PressureField p;        ///< rescaled pressure, modal layout
};

InertialVector make_inertial_vector(const OperatorContext& ctx);

/// Physical snapshot of the evolution.
struct InertialState {
  double t = 0.0;
  PlateField w;      ///< displacement
  PlateField v;      ///< velocity w_t
  PressureField p;   ///< physical pressure
  double energy = 0.0;  ///< D |Lap w|^2-style state energy, = D |y|_X^2
};

/// Physical state -> nondimensional stacked vector (ignores state.t).
InertialVector to_rescaled(const OperatorContext& ctx, const InertialState& s);
/// Nondimensional vector at rescaled time t~ -> physical snapshot.
InertialState to_physical(const OperatorContext& ctx, double t_rescaled,
                          const InertialVector& y);

/// Homogeneous generator A(t~) y in the rescaled frame. Requires a
/// permeability without in-plane dependence (UnsupportedPermeability
/// otherwise: the per-mode structure is what this module is built on).
InertialVector apply_inertial_generator(const OperatorContext& ctx,
                                        const InertialVector& y,
                                        double t_rescaled);

/// X inner product and norm of stacked vectors.
double x_dot(const OperatorContext& ctx, const InertialVector& a,
             const InertialVector& b);
double x_norm_sq(const OperatorContext& ctx, const InertialVector& y);

/// Dissipation form (k~ d3 p, d3 p) at rescaled time t~; equals
/// -(A y, y)_X up to roundoff.
double dissipation_form(const OperatorContext& ctx, const InertialVector& y,
                        double t_rescaled);

/// Solve (I - h A(t~)) y = r by per-mode dense LU blocks. Throws
/// SingularBlock if a block's post-solve residual exceeds 1e-8 relative,
/// UnsupportedPermeability for in-plane-dependent coefficients.
InertialVector resolvent_apply(const OperatorContext& ctx, double h,
                               double t_rescaled, const InertialVector& r);

/// Dense realization of A(t~) on the stacked vector [w^; v^; p^], built
/// column-by-column from apply_inertial_generator, plus the diagonal of
/// the X inner product. Test oracle for the resolvent blocks.
struct DenseGenerator {
  double t_rescaled = 0.0;
  Eigen::MatrixXd A;
  Eigen::VectorXd x_weights;
};

DenseGenerator build_dense_generator(const OperatorContext& ctx,
                                     double t_rescaled);

enum class TimeScheme { BackwardEuler, CrankNicolson };

struct InertialOptions {
  TimeScheme scheme = TimeScheme::BackwardEuler;
  EnergyAssert assert_energy = EnergyAssert::Auto;
  bool store_trajectory = true;
  std::function<void(const InertialState&)> observer;
  /// Content-style initial data pairs with the initial velocity w1 by
  /// default; flip to pair with the displacement w0 instead.
  bool d0_pairs_with_velocity = true;
};

struct InertialRun {
  std::vector<InertialState> states;  ///< physical snapshots
  double tau = 0.0;                   ///< physical step
  double T = 0.0;                     ///< physical horizon
  RescaledFrame frame{};
  std::string scheme = "backward-euler";
  double energy_initial = 0.0;
  /// max over steps of (E_{n+1} - E_n) / max(E_0, eps).
  double max_energy_increase = 0.0;
};

/// Initial physical snapshot from displacement w0, velocity w1 and either a
/// direct pressure or a content-style datum d0 with
/// p(0) = (d0 + alpha x3 Lap w_c) / c_p, w_c = w1 or w0 per the option.
InertialState inertial_initial_state(const OperatorContext& ctx,
                                     const InitialData& init,
                                     const InertialOptions& opts = {});

/// One implicit step of physical length tau from a physical state, using
/// sources evaluated at physical times. Exposed for step-level testing;
/// runs should prefer run_inertial.
InertialState inertial_step(const OperatorContext& ctx,
                            const InertialState& state, double tau,
                            const SourceTerms& sources,
                            const InertialOptions& opts = {});

/// March from t=0 to T in round(T/tau) steps (T must be an integer
/// multiple of tau to 1e-8 relative). For zero sources the X energy is
/// asserted non-increasing under backward Euler; under Crank-Nicolson the
/// assertion additionally requires a time-independent permeability, since
/// the two-sided average of different generators need not contract.
InertialRun run_inertial(const OperatorContext& ctx, const InitialData& init,
                         const SourceTerms& sources, double T, double tau,
                         const InertialOptions& opts = {});

/// How faithfully a snapshot honours the edge and face conditions: sup of
/// |w| and |Lap w| sampled along the plate edge (machine level for the
/// sine basis), the one-sided pressure flux at the faces x3 = +-h relative
/// to the pressure norm (first order in the transverse step for
/// flux-compatible solutions), and the fraction of the state energy
/// carried by the highest-order mode band (resolution indicator).
struct BoundaryReport {
  double plate_edge_sup = 0.0;
  double plate_lap_edge_sup = 0.0;
  double face_flux_bottom = 0.0;
  double face_flux_top = 0.0;
  double modal_tail_fraction = 0.0;
};

BoundaryReport boundary_condition_check(const OperatorContext& ctx,
                                        const InertialState& state);

}  // namespace poroplate

#pragma once
/**
 * @file operators.hpp
 * @brief Matrix-free operator kernel of the coupled plate-pressure system.
 *
 * Unknown pressure fields live in modal(in-plane) x nodes(x3) layout. The
 * operators provided here, all self-adjoint in the weighted inner product
 * (p,q)_h = sum_modes sum_j w_j p q:
 *
 *  - A(t)   : transverse diffusion, the Riesz map of the form
 *             (k(t) d3 p, d3 q); per plane it is W^{-1} S_k with S_k the
 *             flux-form stiffness, so (A p, q)_h == (k d3 p, d3 q) exactly;
 *  - B      : pressure-to-pressure plate feedback beta * x3 * (moment p),
 *             rank one per mode, positive semidefinite;
 *  - c_p I + B : the "fluid content" map zeta = (c_p I + B) p (+ load
 *             lift); inverted by conjugate gradients in (.,.)_h.
 *
 * B is also provided along the literal composition route
 * moment -> (-alpha Laplacian) -> (rigidity * biharmonic)^{-1} ->
 * Laplacian -> (-alpha lift); the two agree to roundoff per mode, which is
 * one of the verification suite's identities.
 *
 * The dense oracle assembles explicit matrices for these operators by
 * pushing unit vectors through the matrix-free kernels; it exists so that
 * tests can compare against conventional dense linear algebra.
 */

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "core/discretization.hpp"
#include "core/errors.hpp"
#include "core/model.hpp"

namespace poroplate {

/// Everything the operator kernels need: constants, basis, grid, coefficient.
struct OperatorContext {
  PhysicalParams params;
  SineBasis basis;
  TransverseGrid grid;
  PermeabilityModel permeability;
};

/// Build a context; throws ValidationError if the constants are
/// inadmissible and BoundsViolation if the permeability declares an empty
/// or non-positive bound interval.
OperatorContext make_context(const PhysicalParams& params, int M, int N,
                             int N3, PermeabilityModel permeability);

/// Sample the permeability at the transverse interval midpoints for one
/// in-plane location, asserting declared bounds at every point. Returns
/// N3-1 values.
std::vector<double> sample_permeability_column(const OperatorContext& ctx,
                                               double x1, double x2, double t);

/// Transverse diffusion A(t) p (modal in, modal out). Coefficient samples
/// are checked against declared bounds; PermeabilityEvalError on
/// non-finite samples, BoundsViolation on out-of-range samples.
PressureField apply_A(const OperatorContext& ctx, const PressureField& p,
                      double t);

/// (k(t) d3 p, d3 q) energy form; equals (apply_A(p), q)_h to roundoff.
double diffusion_form(const OperatorContext& ctx, const PressureField& p,
                      const PressureField& q, double t);

/// Plate feedback B p = beta * x3 * (moment p); modal in, modal out.
PressureField apply_B(const OperatorContext& ctx, const PressureField& p);

/// B along the literal operator composition through the plate solve.
PressureField apply_B_via_diagram(const OperatorContext& ctx,
                                  const PressureField& p);

/// Fluid content map (c_p I + B) p.
PressureField apply_fluid_content(const OperatorContext& ctx,
                                  const PressureField& p);

struct CgOptions {
  double tol = 1e-10;      ///< relative residual target
  int max_iterations = 0;  ///< 0 = automatic cap 10*sqrt(n) + 100
};

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Conjugate gradients in the weighted inner product for a self-adjoint
/// positive-definite field operator. `x` carries the initial guess in and
/// the solution out. Throws NoConvergence past the iteration cap.
CgResult weighted_cg(
    const TransverseGrid& grid,
    const std::function<void(const PressureField&, PressureField&)>& apply,
    const PressureField& b, PressureField& x, const CgOptions& opts);

/// Solve (c_p I + B) p = d by conjugate gradients. Requires c_p > 0.
PressureField invert_fluid_content(const OperatorContext& ctx,
                                   const PressureField& d,
                                   const CgOptions& opts = {},
                                   CgResult* result = nullptr);

/// Hinged-plate solve D Lap^2 w = f - alpha Lap (lifted moment):
/// per mode w = (fhat + alpha lambda mom) / (D lambda^2).
/// `pressure_moment` is the modal moment field (one value per mode).
PlateField solve_plate(const OperatorContext& ctx,
                       const std::vector<double>& pressure_moment,
                       const PlateField& f);

/// Fluid content field zeta = c_p p + alpha x3 * (-Lap w) given (p, w):
/// per mode and node, zeta = c_p p + alpha lambda w x3.
PressureField fluid_content_from_state(const OperatorContext& ctx,
                                       const PressureField& p,
                                       const PlateField& w);

/**
 * @brief Dense realizations of A(t), B and c_p I + B on the flattened
 *        (mode x node) unknown vector, assembled column-by-column from the
 *        matrix-free kernels.
 */
struct DenseOracle {
  double t = 0.0;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd content;   ///< c_p I + B
  Eigen::VectorXd weights;   ///< diagonal of the weighted inner product
};

DenseOracle build_dense_oracle(const OperatorContext& ctx, double t);

}  // namespace poroplate

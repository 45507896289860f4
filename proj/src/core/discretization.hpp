#pragma once
/**
 * @file discretization.hpp
 * @brief Tensor discretization: sine-modal basis on the unit square in the
 *        plate plane, second-order finite differences across the thickness.
 *
 * The plate occupies omega = (0,1)^2 with hinged edges, so the Dirichlet
 * Laplacian and the hinged biharmonic operator are exactly diagonal in the
 * orthonormal basis
 *
 *     phi_mn(x1,x2) = 2 sin(m pi x1) sin(n pi x2),   lambda_mn = pi^2 (m^2+n^2),
 *
 * and all in-plane derivative action is spectral (no in-plane consistency
 * error). The fluid layer Omega = omega x (-h,h) adds a uniform transverse
 * grid carrying trapezoid quadrature, moment weights for the thickness
 * integral int x3 * p dx3, and a flux-form stiffness for the transverse
 * diffusion (k p')' with no-flux ends.
 *
 * Collocation nodes are x_i = i/(M+1); the forward/inverse sine transforms
 * below are exact inverses of each other, and the collocation quadrature
 *
 *     (1/((M+1)(N+1))) * sum_il U_il V_il  =  sum_mn uhat_mn vhat_mn
 *
 * holds to roundoff (discrete Parseval), so modal and collocation norms are
 * interchangeable.
 */

#include <vector>

#include "core/errors.hpp"

namespace poroplate {

/// Role tag for a 2D modal field over the plate.
enum class PlateRole { Displacement, Velocity, Load };

/// In-plane representation of a 3D field on omega x (-h,h).
/// Either way the storage order is mode- (or point-) major, x3 fastest.
enum class PressureLayout { ModalX3, CollocationX3 };

/// Largest permitted number of in-plane modes (M*N).
inline constexpr int kMaxPlaneModes = 1 << 16;

/**
 * @brief In-plane sine basis plan: eigenvalues and transform matrices.
 *
 * Invariants:
 *  - lambda(m,n) = pi^2 (m^2 + n^2), ascending in each index;
 *  - forward(inverse(c)) == c to relative 1e-13 on any field;
 *  - the transform matrices are symmetric and orthogonal up to the scalar
 *    (M+1)/2 per direction.
 */
class SineBasis {
 public:
  SineBasis() = default;
  SineBasis(int M, int N);

  int M() const { return M_; }
  int N() const { return N_; }
  int mode_count() const { return M_ * N_; }

  /// Flat index of mode (m, n), 1-based indices, mode-major (m outer).
  int index(int m, int n) const { return (m - 1) * N_ + (n - 1); }

  /// Dirichlet-Laplacian eigenvalue pi^2 (m^2 + n^2) of mode (m, n).
  double lambda(int m, int n) const { return lambda_[index(m, n)]; }
  const std::vector<double>& lambdas() const { return lambda_; }

  /// Collocation abscissae x1_i = i/(M+1), i = 1..M (and x2_l = l/(N+1)).
  double x1(int i) const { return static_cast<double>(i) / (M_ + 1); }
  double x2(int l) const { return static_cast<double>(l) / (N_ + 1); }

  /// Value of the orthonormal mode phi_mn at collocation point (i, l).
  double phi(int m, int n, int i, int l) const {
    return 2.0 * s1_[(m - 1) * M_ + (i - 1)] * s2_[(n - 1) * N_ + (l - 1)];
  }

  /// Modal coefficients -> point values at the collocation grid.
  /// `coef` and `values` are M*N, mode-major / point-major (x1 outer).
  void inverse(const double* coef, double* values) const;

  /// Point values at the collocation grid -> modal coefficients.
  void forward(const double* values, double* coef) const;

 private:
  int M_ = 0, N_ = 0;
  std::vector<double> lambda_;  // M*N, mode-major
  std::vector<double> s1_;      // M*M, s1[(m-1)*M + (i-1)] = sin(m i pi/(M+1))
  std::vector<double> s2_;      // N*N
  mutable std::vector<double> scratch_;  // M*N workspace for the 2D product
};

/// Build a basis plan. Throws SizeError if M*N exceeds kMaxPlaneModes or
/// either count is non-positive.
SineBasis plan_basis(int M, int N);

/**
 * @brief Uniform transverse grid on [-h, h] with quadrature, moment and
 *        stiffness metadata.
 *
 * Nodes are mirrored around 0 so that x3_j = -x3_{N3-1-j} exactly in
 * floating point; with trapezoid weights this makes the moment weights sum
 * to zero identically. Stiffness uses midpoint-sampled coefficients in flux
 * form, which at the ends is identical to the one-sided no-flux (ghost
 * node) closure and keeps the quadratic form symmetric positive
 * semidefinite with kernel = constants.
 *
 * Invariants:
 *  - sum_j weight(j) == 2h to relative 1e-14;
 *  - sum_j moment_weight(j) == 0 to 1e-14 * h^2;
 *  - for admissible k: p^T S_k p >= kmin * p^T S_1 p for all p.
 */
class TransverseGrid {
 public:
  TransverseGrid() = default;
  TransverseGrid(int N3, double h);

  int N3() const { return N3_; }
  double h() const { return h_; }
  double dx() const { return dx_; }

  double node(int j) const { return node_[j]; }
  double midpoint(int j) const { return mid_[j]; }  // j = 0..N3-2
  double weight(int j) const { return w_[j]; }
  double moment_weight(int j) const { return mw_[j]; }

  const std::vector<double>& nodes() const { return node_; }
  const std::vector<double>& weights() const { return w_; }
  const std::vector<double>& moment_weights() const { return mw_; }

  /// S_k p: flux-form stiffness with per-interval coefficients
  /// k[j] ~ k(midpoint(j)).  `p` and `out` have N3 entries; aliasing is
  /// not allowed.
  void apply_stiffness(const double* k, const double* p, double* out) const;

  /// Quadratic form p^T S_k q without forming S.
  double stiffness_form(const double* k, const double* p,
                        const double* q) const;

 private:
  int N3_ = 0;
  double h_ = 0.0, dx_ = 0.0;
  std::vector<double> node_, mid_, w_, mw_;
};

/// Build a transverse grid. Throws SizeError for N3 < 3, ValidationError
/// for h <= 0.
TransverseGrid build_transverse_grid(int N3, double h);

/// 2D modal field over the plate: coef[(m-1)*N + (n-1)].
struct PlateField {
  int M = 0, N = 0;
  PlateRole role = PlateRole::Load;
  std::vector<double> coef;
};

PlateField make_plate_field(const SineBasis& basis, PlateRole role);

/// 3D field over omega x (-h,h): val[mode_or_point * N3 + j], x3 fastest.
struct PressureField {
  int M = 0, N = 0, N3 = 0;
  PressureLayout layout = PressureLayout::ModalX3;
  std::vector<double> val;

  int plane_count() const { return M * N; }
  double* column(int plane) { return val.data() + static_cast<std::size_t>(plane) * N3; }
  const double* column(int plane) const {
    return val.data() + static_cast<std::size_t>(plane) * N3;
  }
};

PressureField make_pressure_field(const SineBasis& basis,
                                  const TransverseGrid& grid,
                                  PressureLayout layout = PressureLayout::ModalX3);

/// Layout conversions (slice-wise 2D transforms over each x3 level).
/// Exact inverses of each other to relative 1e-13.
PressureField to_collocation(const SineBasis& basis, const PressureField& p);
PressureField to_modal(const SineBasis& basis, const PressureField& p);

/// Thickness moment (K p)(x1,x2) = int_{-h}^{h} x3 p dx3 by the grid's
/// moment weights, applied plane-by-plane. Result inherits the input's
/// in-plane representation (modal in -> modal out).
std::vector<double> moment(const TransverseGrid& grid, const PressureField& p);

/// Adjoint embedding (lift) q(x1,x2) -> x3 * q(x1,x2): constant-in-plane
/// structure, satisfying the discrete adjoint identity
/// (K p, q)_omega = (p, lift q)_Omega exactly.
PressureField lift_moment(const SineBasis& basis, const TransverseGrid& grid,
                          const std::vector<double>& q,
                          PressureLayout layout = PressureLayout::ModalX3);

// --- Inner products and norms -------------------------------------------
// All pressure-side products take modal-layout fields (convert first); the
// same values hold for collocation fields by Parseval.

/// sum_mn a_mn b_mn
double plate_dot(const PlateField& a, const PlateField& b);
/// L2(omega) norm of a modal plate field: sqrt(sum coef^2).
double plate_l2(const PlateField& a);
/// Hinged-plate energy norm sqrt(sum lambda^2 coef^2)  (= |Laplacian w|_L2).
double plate_energy_norm(const SineBasis& basis, const PlateField& a);

/// L2(Omega) inner product: sum_mn sum_j w_j a b.
double pressure_dot(const TransverseGrid& grid, const PressureField& a,
                    const PressureField& b);
double pressure_l2(const TransverseGrid& grid, const PressureField& a);
/// Transverse seminorm |d3 p|_L2 via the k==1 stiffness form.
double pressure_d3_seminorm(const TransverseGrid& grid, const PressureField& a);
/// Full transverse-H1 norm sqrt(l2^2 + d3^2).
double pressure_v_norm(const TransverseGrid& grid, const PressureField& a);

// Small vector helpers shared by the solvers (flat loops, no aliasing).
void axpy(double a, const std::vector<double>& x, std::vector<double>& y);
double dot(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace poroplate

#include "core/discretization.hpp"

#include <cmath>
#include <cstddef>

namespace poroplate {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}  // namespace

SineBasis::SineBasis(int M, int N) : M_(M), N_(N) {
  lambda_.resize(static_cast<std::size_t>(M) * N);
  for (int m = 1; m <= M; ++m)
    for (int n = 1; n <= N; ++n)
      lambda_[index(m, n)] =
          kPi * kPi * (static_cast<double>(m) * m + static_cast<double>(n) * n);

  s1_.resize(static_cast<std::size_t>(M) * M);
  for (int m = 1; m <= M; ++m)
    for (int i = 1; i <= M; ++i)
      s1_[(m - 1) * M + (i - 1)] =
          std::sin(static_cast<double>(m) * i * kPi / (M + 1));
  s2_.resize(static_cast<std::size_t>(N) * N);
  for (int n = 1; n <= N; ++n)
    for (int l = 1; l <= N; ++l)
      s2_[(n - 1) * N + (l - 1)] =
          std::sin(static_cast<double>(n) * l * kPi / (N + 1));
  scratch_.resize(static_cast<std::size_t>(M) * N);
}

// Both transforms are the separable product  out = scale * S1 * in * S2 with
// symmetric sine matrices; they differ only in the scalar in front
// (2 for modal->points, 2/((M+1)(N+1)) for points->modal).
void SineBasis::inverse(const double* coef, double* values) const {
  // scratch = S1 * coef   (contract the m index)
  for (int i = 0; i < M_; ++i)
    for (int n = 0; n < N_; ++n) {
      double acc = 0.0;
      for (int m = 0; m < M_; ++m) acc += s1_[m * M_ + i] * coef[m * N_ + n];
      scratch_[i * N_ + n] = acc;
    }
  // values = 2 * scratch * S2   (contract the n index)
  for (int i = 0; i < M_; ++i)
    for (int l = 0; l < N_; ++l) {
      double acc = 0.0;
      for (int n = 0; n < N_; ++n) acc += scratch_[i * N_ + n] * s2_[n * N_ + l];
      values[i * N_ + l] = 2.0 * acc;
    }
}

void SineBasis::forward(const double* values, double* coef) const {
  const double scale = 2.0 / (static_cast<double>(M_ + 1) * (N_ + 1));
  for (int m = 0; m < M_; ++m)
    for (int l = 0; l < N_; ++l) {
      double acc = 0.0;
      for (int i = 0; i < M_; ++i) acc += s1_[m * M_ + i] * values[i * N_ + l];
      scratch_[m * N_ + l] = acc;
    }
  for (int m = 0; m < M_; ++m)
    for (int n = 0; n < N_; ++n) {
      double acc = 0.0;
      for (int l = 0; l < N_; ++l) acc += scratch_[m * N_ + l] * s2_[n * N_ + l];
      coef[m * N_ + n] = scale * acc;
    }
}

SineBasis plan_basis(int M, int N) {
  if (M < 1 || N < 1)
    throw SizeError("plan_basis: mode counts must be positive, got M=" +
                    std::to_string(M) + " N=" + std::to_string(N));
  if (static_cast<long long>(M) * N > kMaxPlaneModes)
    throw SizeError("plan_basis: M*N = " + std::to_string(static_cast<long long>(M) * N) +
                    " exceeds the limit " + std::to_string(kMaxPlaneModes));
  return SineBasis(M, N);
}

TransverseGrid::TransverseGrid(int N3, double h) : N3_(N3), h_(h) {
  dx_ = 2.0 * h / (N3 - 1);
  node_.resize(N3);
  // Mirrored construction: exact sign symmetry of the nodes in floating
  // point, hence moment weights that cancel pairwise.
  for (int j = 0; j < N3 / 2; ++j) {
    double x = -h + j * dx_;
    node_[j] = x;
    node_[N3 - 1 - j] = -x;
  }
  if (N3 % 2 == 1) node_[N3 / 2] = 0.0;

  mid_.resize(N3 - 1);
  for (int j = 0; j + 1 < N3; ++j) mid_[j] = 0.5 * (node_[j] + node_[j + 1]);

  w_.assign(N3, dx_);
  w_.front() = 0.5 * dx_;
  w_.back() = 0.5 * dx_;

  mw_.resize(N3);
  for (int j = 0; j < N3; ++j) mw_[j] = w_[j] * node_[j];
}

void TransverseGrid::apply_stiffness(const double* k, const double* p,
                                     double* out) const {
  const int n = N3_;
  for (int j = 0; j < n; ++j) out[j] = 0.0;
  for (int j = 0; j + 1 < n; ++j) {
    double flux = k[j] * (p[j + 1] - p[j]) / dx_;
    out[j] -= flux;
    out[j + 1] += flux;
  }
}

double TransverseGrid::stiffness_form(const double* k, const double* p,
                                      const double* q) const {
  double acc = 0.0;
  for (int j = 0; j + 1 < N3_; ++j)
    acc += k[j] * (p[j + 1] - p[j]) * (q[j + 1] - q[j]) / dx_;
  return acc;
}

TransverseGrid build_transverse_grid(int N3, double h) {
  if (N3 < 3)
    throw SizeError("build_transverse_grid: need at least 3 nodes, got " +
                    std::to_string(N3));
  if (!(h > 0.0))
    throw ValidationError("build_transverse_grid: half-thickness h must be positive");
  return TransverseGrid(N3, h);
}

PlateField make_plate_field(const SineBasis& basis, PlateRole role) {
  PlateField f;
  f.M = basis.M();
  f.N = basis.N();
  f.role = role;
  f.coef.assign(static_cast<std::size_t>(f.M) * f.N, 0.0);
  return f;
}

PressureField make_pressure_field(const SineBasis& basis,
                                  const TransverseGrid& grid,
                                  PressureLayout layout) {
  PressureField p;
  p.M = basis.M();
  p.N = basis.N();
  p.N3 = grid.N3();
  p.layout = layout;
  p.val.assign(static_cast<std::size_t>(p.M) * p.N * p.N3, 0.0);
  return p;
}

namespace {

PressureField convert_layout(const SineBasis& basis, const PressureField& p,
                             PressureLayout target) {
  if (p.M != basis.M() || p.N != basis.N())
    throw ValidationError("pressure layout conversion: field/basis shape mismatch");
  PressureField out = p;
  out.layout = target;
  const int planes = p.plane_count();
  const int N3 = p.N3;
  std::vector<double> slice_in(planes), slice_out(planes);
  for (int j = 0; j < N3; ++j) {
    for (int q = 0; q < planes; ++q)
      slice_in[q] = p.val[static_cast<std::size_t>(q) * N3 + j];
    if (target == PressureLayout::CollocationX3)
      basis.inverse(slice_in.data(), slice_out.data());
    else
      basis.forward(slice_in.data(), slice_out.data());
    for (int q = 0; q < planes; ++q)
      out.val[static_cast<std::size_t>(q) * N3 + j] = slice_out[q];
  }
  return out;
}

}  // namespace

PressureField to_collocation(const SineBasis& basis, const PressureField& p) {
  if (p.layout == PressureLayout::CollocationX3) return p;
  return convert_layout(basis, p, PressureLayout::CollocationX3);
}

PressureField to_modal(const SineBasis& basis, const PressureField& p) {
  if (p.layout == PressureLayout::ModalX3) return p;
  return convert_layout(basis, p, PressureLayout::ModalX3);
}

std::vector<double> moment(const TransverseGrid& grid, const PressureField& p) {
  if (p.N3 != grid.N3())
    throw ValidationError("moment: field/grid N3 mismatch");
  const int planes = p.plane_count();
  std::vector<double> out(planes, 0.0);
  for (int q = 0; q < planes; ++q) {
    const double* col = p.column(q);
    double acc = 0.0;
    for (int j = 0; j < p.N3; ++j) acc += grid.moment_weight(j) * col[j];
    out[q] = acc;
  }
  return out;
}

PressureField lift_moment(const SineBasis& basis, const TransverseGrid& grid,
                          const std::vector<double>& q, PressureLayout layout) {
  if (static_cast<int>(q.size()) != basis.mode_count())
    throw ValidationError("lift_moment: plane field size mismatch");
  PressureField out = make_pressure_field(basis, grid, layout);
  for (int plane = 0; plane < out.plane_count(); ++plane) {
    double* col = out.column(plane);
    for (int j = 0; j < out.N3; ++j) col[j] = grid.node(j) * q[plane];
  }
  return out;
}

double plate_dot(const PlateField& a, const PlateField& b) {
  return dot(a.coef, b.coef);
}

double plate_l2(const PlateField& a) { return std::sqrt(dot(a.coef, a.coef)); }

double plate_energy_norm(const SineBasis& basis, const PlateField& a) {
  const std::vector<double>& lam = basis.lambdas();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.coef.size(); ++i)
    acc += lam[i] * lam[i] * a.coef[i] * a.coef[i];
  return std::sqrt(acc);
}

double pressure_dot(const TransverseGrid& grid, const PressureField& a,
                    const PressureField& b) {
  if (a.layout != PressureLayout::ModalX3 || b.layout != PressureLayout::ModalX3)
    throw ValidationError("pressure_dot: expects modal-layout fields");
  if (a.val.size() != b.val.size() || a.N3 != grid.N3())
    throw ValidationError("pressure_dot: shape mismatch");
  double acc = 0.0;
  for (int q = 0; q < a.plane_count(); ++q) {
    const double* pa = a.column(q);
    const double* pb = b.column(q);
    for (int j = 0; j < a.N3; ++j) acc += grid.weight(j) * pa[j] * pb[j];
  }
  return acc;
}

double pressure_l2(const TransverseGrid& grid, const PressureField& a) {
  return std::sqrt(pressure_dot(grid, a, a));
}

double pressure_d3_seminorm(const TransverseGrid& grid, const PressureField& a) {
  if (a.layout != PressureLayout::ModalX3)
    throw ValidationError("pressure_d3_seminorm: expects a modal-layout field");
  std::vector<double> ones(grid.N3() - 1, 1.0);
  double acc = 0.0;
  for (int q = 0; q < a.plane_count(); ++q) {
    const double* col = a.column(q);
    acc += grid.stiffness_form(ones.data(), col, col);
  }
  return std::sqrt(acc);
}

double pressure_v_norm(const TransverseGrid& grid, const PressureField& a) {
  double l2 = pressure_l2(grid, a);
  double d3 = pressure_d3_seminorm(grid, a);
  return std::sqrt(l2 * l2 + d3 * d3);
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

}  // namespace poroplate

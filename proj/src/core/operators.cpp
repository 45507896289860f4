#include "core/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace poroplate {

OperatorContext make_context(const PhysicalParams& params, int M, int N,
                             int N3, PermeabilityModel permeability) {
  ValidationReport r = validate_params(params);
  if (!r.all_pass()) {
    std::string names;
    for (const ValidationIssue& it : r.items)
      if (!it.pass) names += (names.empty() ? "" : ", ") + it.name;
    throw ValidationError("make_context: inadmissible parameters (" + names + ")");
  }
  if (!permeability.evaluate)
    throw PermeabilityEvalError("make_context: permeability '" +
                                permeability.name + "' has no evaluate callback");
  if (!(permeability.k_lower > 0.0) ||
      permeability.k_upper < permeability.k_lower)
    throw BoundsViolation("make_context: permeability '" + permeability.name +
                          "' declares inadmissible bounds");
  OperatorContext ctx;
  ctx.params = params;
  ctx.basis = plan_basis(M, N);
  ctx.grid = build_transverse_grid(N3, params.h);
  ctx.permeability = std::move(permeability);
  return ctx;
}

std::vector<double> sample_permeability_column(const OperatorContext& ctx,
                                               double x1, double x2,
                                               double t) {
  const PermeabilityModel& k = ctx.permeability;
  const int nint = ctx.grid.N3() - 1;
  std::vector<double> out(nint);
  for (int j = 0; j < nint; ++j) {
    double v = k.evaluate(x1, x2, ctx.grid.midpoint(j), t);
    if (!std::isfinite(v))
      throw PermeabilityEvalError(
          "permeability '" + k.name + "' non-finite at x3=" +
          std::to_string(ctx.grid.midpoint(j)) + ", t=" + std::to_string(t));
    if (v < k.k_lower || v > k.k_upper)
      throw BoundsViolation("permeability '" + k.name + "' = " +
                            std::to_string(v) + " outside declared [" +
                            std::to_string(k.k_lower) + ", " +
                            std::to_string(k.k_upper) + "] at x3=" +
                            std::to_string(ctx.grid.midpoint(j)) +
                            ", t=" + std::to_string(t));
    out[j] = v;
  }
  return out;
}

namespace {

void require_modal(const PressureField& p, const char* where) {
  if (p.layout != PressureLayout::ModalX3)
    throw ValidationError(std::string(where) + ": expects a modal-layout field");
}

void require_shape(const OperatorContext& ctx, const PressureField& p,
                   const char* where) {
  if (p.M != ctx.basis.M() || p.N != ctx.basis.N() || p.N3 != ctx.grid.N3())
    throw ValidationError(std::string(where) + ": field/context shape mismatch");
}

// Shared-stiffness path: one coefficient column for every plane.
void apply_A_shared(const OperatorContext& ctx, const std::vector<double>& k,
                    const PressureField& p, PressureField& out) {
  const int N3 = ctx.grid.N3();
  std::vector<double> s(N3);
  for (int plane = 0; plane < p.plane_count(); ++plane) {
    const double* col = p.column(plane);
    double* o = out.column(plane);
    ctx.grid.apply_stiffness(k.data(), col, s.data());
    for (int j = 0; j < N3; ++j) o[j] = s[j] / ctx.grid.weight(j);
  }
}

}  // namespace

PressureField apply_A(const OperatorContext& ctx, const PressureField& p,
                      double t) {
  require_modal(p, "apply_A");
  require_shape(ctx, p, "apply_A");
  PressureField out = make_pressure_field(ctx.basis, ctx.grid);

  switch (ctx.permeability.structure) {
    case PermeabilityStructure::Constant:
    case PermeabilityStructure::TransverseOnly: {
      // In-plane independent coefficient: the modal planes decouple and all
      // share one stiffness column.
      std::vector<double> k = sample_permeability_column(ctx, 0.5, 0.5, t);
      apply_A_shared(ctx, k, p, out);
      return out;
    }
    case PermeabilityStructure::General: {
      // Pointwise coefficient: evaluate the flux form at collocation
      // points, then return to modal space. Exactly self-adjoint in the
      // weighted product because the transform is an isometry.
      PressureField pc = to_collocation(ctx.basis, p);
      PressureField oc = make_pressure_field(ctx.basis, ctx.grid,
                                             PressureLayout::CollocationX3);
      const int N3 = ctx.grid.N3();
      std::vector<double> s(N3);
      int plane = 0;
      for (int i = 1; i <= ctx.basis.M(); ++i) {
        for (int l = 1; l <= ctx.basis.N(); ++l, ++plane) {
          std::vector<double> k = sample_permeability_column(
              ctx, ctx.basis.x1(i), ctx.basis.x2(l), t);
          const double* col = pc.column(plane);
          double* o = oc.column(plane);
          ctx.grid.apply_stiffness(k.data(), col, s.data());
          for (int j = 0; j < N3; ++j) o[j] = s[j] / ctx.grid.weight(j);
        }
      }
      return to_modal(ctx.basis, oc);
    }
  }
  throw UnsupportedPermeability("apply_A: unknown permeability structure tag");
}

double diffusion_form(const OperatorContext& ctx, const PressureField& p,
                      const PressureField& q, double t) {
  require_modal(p, "diffusion_form");
  require_modal(q, "diffusion_form");
  require_shape(ctx, p, "diffusion_form");
  require_shape(ctx, q, "diffusion_form");

  switch (ctx.permeability.structure) {
    case PermeabilityStructure::Constant:
    case PermeabilityStructure::TransverseOnly: {
      std::vector<double> k = sample_permeability_column(ctx, 0.5, 0.5, t);
      double acc = 0.0;
      for (int plane = 0; plane < p.plane_count(); ++plane)
        acc += ctx.grid.stiffness_form(k.data(), p.column(plane), q.column(plane));
      return acc;
    }
    case PermeabilityStructure::General: {
      PressureField pc = to_collocation(ctx.basis, p);
      PressureField qc = to_collocation(ctx.basis, q);
      const double scale =
          1.0 / (static_cast<double>(ctx.basis.M() + 1) * (ctx.basis.N() + 1));
      double acc = 0.0;
      int plane = 0;
      for (int i = 1; i <= ctx.basis.M(); ++i)
        for (int l = 1; l <= ctx.basis.N(); ++l, ++plane) {
          std::vector<double> k = sample_permeability_column(
              ctx, ctx.basis.x1(i), ctx.basis.x2(l), t);
          acc += scale * ctx.grid.stiffness_form(k.data(), pc.column(plane),
                                                 qc.column(plane));
        }
      return acc;
    }
  }
  throw UnsupportedPermeability("diffusion_form: unknown permeability structure tag");
}

PressureField apply_B(const OperatorContext& ctx, const PressureField& p) {
  require_modal(p, "apply_B");
  require_shape(ctx, p, "apply_B");
  const double beta = ctx.params.beta;
  PressureField out = make_pressure_field(ctx.basis, ctx.grid);
  std::vector<double> mom = moment(ctx.grid, p);
  for (int plane = 0; plane < p.plane_count(); ++plane) {
    double* o = out.column(plane);
    for (int j = 0; j < p.N3; ++j) o[j] = beta * ctx.grid.node(j) * mom[plane];
  }
  return out;
}

PressureField apply_B_via_diagram(const OperatorContext& ctx,
                                  const PressureField& p) {
  require_modal(p, "apply_B_via_diagram");
  require_shape(ctx, p, "apply_B_via_diagram");
  const double alpha = ctx.params.alpha;
  const double D = ctx.params.D;
  const std::vector<double>& lam = ctx.basis.lambdas();

  // moment -> (-alpha Lap) -> (D Lap^2)^{-1} -> Lap -> (-alpha lift),
  // kept as five separate stages on purpose: the pipeline itself is under
  // test against the collapsed rank-one form.
  std::vector<double> stage = moment(ctx.grid, p);            // K p
  for (std::size_t q = 0; q < stage.size(); ++q)
    stage[q] *= alpha * lam[q];                               // -alpha Lap
  for (std::size_t q = 0; q < stage.size(); ++q)
    stage[q] /= D * lam[q] * lam[q];                          // (D Lap^2)^{-1}
  for (std::size_t q = 0; q < stage.size(); ++q)
    stage[q] *= -lam[q];                                      // Lap
  for (std::size_t q = 0; q < stage.size(); ++q)
    stage[q] *= -alpha;                                       // -alpha * lift scalar
  return lift_moment(ctx.basis, ctx.grid, stage);
}

PressureField apply_fluid_content(const OperatorContext& ctx,
                                  const PressureField& p) {
  PressureField out = apply_B(ctx, p);
  const double c_p = ctx.params.c_p;
  for (std::size_t i = 0; i < out.val.size(); ++i) out.val[i] += c_p * p.val[i];
  return out;
}

CgResult weighted_cg(
    const TransverseGrid& grid,
    const std::function<void(const PressureField&, PressureField&)>& apply,
    const PressureField& b, PressureField& x, const CgOptions& opts) {
  const std::size_t n = b.val.size();
  int cap = opts.max_iterations > 0
                ? opts.max_iterations
                : static_cast<int>(10.0 * std::sqrt(static_cast<double>(n))) + 100;

  PressureField r = b;
  PressureField Ax = b;
  apply(x, Ax);
  for (std::size_t i = 0; i < n; ++i) r.val[i] -= Ax.val[i];

  const double bnorm = pressure_l2(grid, b);
  if (bnorm == 0.0) {
    for (double& v : x.val) v = 0.0;
    return {0, 0.0};
  }

  double rho = pressure_dot(grid, r, r);
  double rel = std::sqrt(rho) / bnorm;
  if (rel <= opts.tol) return {0, rel};

  PressureField d = r;
  PressureField Ad = b;
  for (int it = 1; it <= cap; ++it) {
    apply(d, Ad);
    double dAd = pressure_dot(grid, d, Ad);
    if (!(dAd > 0.0))
      throw NoConvergence(
          "weighted_cg: operator lost positive definiteness (d^T A d = " +
              std::to_string(dAd) + ")",
          it, rel);
    double alpha = rho / dAd;
    for (std::size_t i = 0; i < n; ++i) x.val[i] += alpha * d.val[i];
    for (std::size_t i = 0; i < n; ++i) r.val[i] -= alpha * Ad.val[i];
    double rho_next = pressure_dot(grid, r, r);
    rel = std::sqrt(rho_next) / bnorm;
    if (rel <= opts.tol) return {it, rel};
    double gamma = rho_next / rho;
    rho = rho_next;
    for (std::size_t i = 0; i < n; ++i) d.val[i] = r.val[i] + gamma * d.val[i];
  }
  throw NoConvergence("weighted_cg: no convergence within " +
                          std::to_string(cap) + " iterations (residual " +
                          std::to_string(rel) + ")",
                      cap, rel);
}

PressureField invert_fluid_content(const OperatorContext& ctx,
                                   const PressureField& d,
                                   const CgOptions& opts, CgResult* result) {
  if (!(ctx.params.c_p > 0.0))
    throw ValidationError(
        "invert_fluid_content: requires c_p > 0 (content map singular otherwise)");
  require_modal(d, "invert_fluid_content");
  require_shape(ctx, d, "invert_fluid_content");
  PressureField x = make_pressure_field(ctx.basis, ctx.grid);
  auto apply = [&ctx](const PressureField& in, PressureField& out) {
    out = apply_fluid_content(ctx, in);
  };
  CgResult r = weighted_cg(ctx.grid, apply, d, x, opts);
  if (result) *result = r;
  return x;
}

PlateField solve_plate(const OperatorContext& ctx,
                       const std::vector<double>& pressure_moment,
                       const PlateField& f) {
  if (static_cast<int>(pressure_moment.size()) != ctx.basis.mode_count())
    throw ValidationError("solve_plate: moment field size mismatch");
  if (f.M != ctx.basis.M() || f.N != ctx.basis.N())
    throw ValidationError("solve_plate: load/basis shape mismatch");
  const double alpha = ctx.params.alpha;
  const double D = ctx.params.D;
  const std::vector<double>& lam = ctx.basis.lambdas();
  PlateField w = make_plate_field(ctx.basis, PlateRole::Displacement);
  for (int q = 0; q < ctx.basis.mode_count(); ++q)
    w.coef[q] = (f.coef[q] + alpha * lam[q] * pressure_moment[q]) /
                (D * lam[q] * lam[q]);
  return w;
}

PressureField fluid_content_from_state(const OperatorContext& ctx,
                                       const PressureField& p,
                                       const PlateField& w) {
  require_modal(p, "fluid_content_from_state");
  require_shape(ctx, p, "fluid_content_from_state");
  const double alpha = ctx.params.alpha;
  const double c_p = ctx.params.c_p;
  const std::vector<double>& lam = ctx.basis.lambdas();
  PressureField z = make_pressure_field(ctx.basis, ctx.grid);
  for (int plane = 0; plane < p.plane_count(); ++plane) {
    const double* pp = p.column(plane);
    double* zz = z.column(plane);
    double lw = alpha * lam[plane] * w.coef[plane];
    for (int j = 0; j < p.N3; ++j)
      zz[j] = c_p * pp[j] + lw * ctx.grid.node(j);
  }
  return z;
}

DenseOracle build_dense_oracle(const OperatorContext& ctx, double t) {
  const int n = ctx.basis.mode_count() * ctx.grid.N3();
  DenseOracle o;
  o.t = t;
  o.A.resize(n, n);
  o.B.resize(n, n);
  o.content.resize(n, n);
  o.weights.resize(n);

  PressureField unit = make_pressure_field(ctx.basis, ctx.grid);
  for (int c = 0; c < n; ++c) {
    std::fill(unit.val.begin(), unit.val.end(), 0.0);
    unit.val[c] = 1.0;
    PressureField a = apply_A(ctx, unit, t);
    PressureField b = apply_B(ctx, unit);
    PressureField z = apply_fluid_content(ctx, unit);
    for (int r = 0; r < n; ++r) {
      o.A(r, c) = a.val[r];
      o.B(r, c) = b.val[r];
      o.content(r, c) = z.val[r];
    }
  }
  const int N3 = ctx.grid.N3();
  for (int q = 0; q < ctx.basis.mode_count(); ++q)
    for (int j = 0; j < N3; ++j)
      o.weights[q * N3 + j] = ctx.grid.weight(j);
  return o;
}

}  // namespace poroplate

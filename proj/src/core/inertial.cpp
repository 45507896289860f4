#include "core/inertial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace poroplate {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

int checked_step_count(double T, double tau) {
  if (!(tau > 0.0) || !(T > 0.0))
    throw ValidationError("time stepping requires T > 0 and tau > 0");
  long long n = std::llround(T / tau);
  if (n < 1 || std::abs(static_cast<double>(n) * tau - T) >
                   1e-8 * std::max(1.0, std::abs(T)))
    throw ValidationError(
        "horizon T must be an integer multiple of the step tau");
  return static_cast<int>(n);
}

/// Rescaled per-interval diffusion coefficients k~ = (sigma / c_p) k at
/// rescaled time t~. The per-mode block structure needs a coefficient
/// without in-plane dependence.
std::vector<double> rescaled_column(const OperatorContext& ctx,
                                    const RescaledFrame& frame,
                                    double t_rescaled) {
  if (ctx.permeability.structure == PermeabilityStructure::General)
    throw UnsupportedPermeability(
        "inertial evolution requires a permeability without in-plane "
        "dependence");
  std::vector<double> k =
      sample_permeability_column(ctx, 0.5, 0.5, frame.sigma * t_rescaled);
  const double scale = frame.sigma / ctx.params.c_p;
  for (double& v : k) v *= scale;
  return k;
}

void check_vector_shape(const OperatorContext& ctx, const InertialVector& y,
                        const char* what) {
  const std::size_t q = static_cast<std::size_t>(ctx.basis.mode_count());
  if (y.w.size() != q || y.v.size() != q ||
      y.p.val.size() != q * static_cast<std::size_t>(ctx.grid.N3()))
    throw ValidationError(std::string(what) + ": stacked vector shape mismatch");
}

/// Nondimensional source vector tau~ * F(t~): f~ into the v slots, g~ into
/// the pressure slots.
void add_scaled_sources(const OperatorContext& ctx, const RescaledFrame& frame,
                        const SourceTerms& sources, double t_rescaled,
                        double weight, InertialVector& r) {
  const double t_phys = frame.sigma * t_rescaled;
  if (sources.plate_load) {
    PlateField f = eval_plate_load(sources, ctx.basis, t_phys);
    const double s = weight / ctx.params.D;
    for (std::size_t q = 0; q < r.v.size(); ++q) r.v[q] += s * f.coef[q];
  }
  if (sources.fluid_source) {
    PressureField g = eval_fluid_source(sources, ctx.basis, ctx.grid, t_phys);
    const double s = weight * frame.sigma / (ctx.params.c_p * frame.b);
    axpy(s, g.val, r.p.val);
  }
}

bool sources_identically_zero(const SourceTerms& s) {
  return !s.plate_load && !s.fluid_source;
}

}  // namespace

RescaledFrame rescaled_frame(const PhysicalParams& params) {
  RescaledFrame f;
  f.sigma = std::sqrt(params.rho_p / params.D);
  f.b = std::sqrt(params.D / params.c_p);
  f.a_c = params.alpha / std::sqrt(params.c_p * params.D);
  return f;
}

InertialVector make_inertial_vector(const OperatorContext& ctx) {
  InertialVector y;
  y.w.assign(ctx.basis.mode_count(), 0.0);
  y.v.assign(ctx.basis.mode_count(), 0.0);
  y.p = make_pressure_field(ctx.basis, ctx.grid);
  return y;
}

InertialVector to_rescaled(const OperatorContext& ctx, const InertialState& s) {
  const RescaledFrame frame = rescaled_frame(ctx.params);
  InertialVector y = make_inertial_vector(ctx);
  for (std::size_t q = 0; q < y.w.size(); ++q) {
    y.w[q] = s.w.coef[q];
    y.v[q] = frame.sigma * s.v.coef[q];
  }
  for (std::size_t i = 0; i < y.p.val.size(); ++i)
    y.p.val[i] = s.p.val[i] / frame.b;
  return y;
}

InertialState to_physical(const OperatorContext& ctx, double t_rescaled,
                          const InertialVector& y) {
  const RescaledFrame frame = rescaled_frame(ctx.params);
  InertialState s;
  s.t = frame.sigma * t_rescaled;
  s.w = make_plate_field(ctx.basis, PlateRole::Displacement);
  s.v = make_plate_field(ctx.basis, PlateRole::Velocity);
  s.p = make_pressure_field(ctx.basis, ctx.grid);
  for (std::size_t q = 0; q < y.w.size(); ++q) {
    s.w.coef[q] = y.w[q];
    s.v.coef[q] = y.v[q] / frame.sigma;
  }
  for (std::size_t i = 0; i < y.p.val.size(); ++i)
    s.p.val[i] = frame.b * y.p.val[i];
  s.energy = ctx.params.D * x_norm_sq(ctx, y);
  return s;
}

InertialVector apply_inertial_generator(const OperatorContext& ctx,
                                        const InertialVector& y,
                                        double t_rescaled) {
  check_vector_shape(ctx, y, "apply_inertial_generator");
  const RescaledFrame frame = rescaled_frame(ctx.params);
  const std::vector<double> k = rescaled_column(ctx, frame, t_rescaled);
  const std::vector<double>& lam = ctx.basis.lambdas();
  const int n3 = ctx.grid.N3();

  InertialVector out = make_inertial_vector(ctx);
  std::vector<double> sp(n3);
  for (int q = 0; q < ctx.basis.mode_count(); ++q) {
    const double* col = y.p.column(q);
    double mom = 0.0;
    for (int j = 0; j < n3; ++j) mom += ctx.grid.moment_weight(j) * col[j];

    out.w[q] = y.v[q];
    out.v[q] = -lam[q] * lam[q] * y.w[q] + frame.a_c * lam[q] * mom;

    ctx.grid.apply_stiffness(k.data(), col, sp.data());
    double* pout = out.p.column(q);
    for (int j = 0; j < n3; ++j)
      pout[j] = -frame.a_c * lam[q] * ctx.grid.node(j) * y.v[q] -
                sp[j] / ctx.grid.weight(j);
  }
  return out;
}

double x_dot(const OperatorContext& ctx, const InertialVector& a,
             const InertialVector& b) {
  check_vector_shape(ctx, a, "x_dot");
  check_vector_shape(ctx, b, "x_dot");
  const std::vector<double>& lam = ctx.basis.lambdas();
  double acc = 0.0;
  for (std::size_t q = 0; q < a.w.size(); ++q)
    acc += lam[q] * lam[q] * a.w[q] * b.w[q] + a.v[q] * b.v[q];
  return acc + pressure_dot(ctx.grid, a.p, b.p);
}

double x_norm_sq(const OperatorContext& ctx, const InertialVector& y) {
  return x_dot(ctx, y, y);
}

double dissipation_form(const OperatorContext& ctx, const InertialVector& y,
                        double t_rescaled) {
  check_vector_shape(ctx, y, "dissipation_form");
  const RescaledFrame frame = rescaled_frame(ctx.params);
  const std::vector<double> k = rescaled_column(ctx, frame, t_rescaled);
  double acc = 0.0;
  for (int q = 0; q < ctx.basis.mode_count(); ++q)
    acc += ctx.grid.stiffness_form(k.data(), y.p.column(q), y.p.column(q));
  return acc;
}

InertialVector resolvent_apply(const OperatorContext& ctx, double h,
                               double t_rescaled, const InertialVector& r) {
  check_vector_shape(ctx, r, "resolvent_apply");
  if (!(h > 0.0)) throw ValidationError("resolvent_apply: h must be positive");
  const RescaledFrame frame = rescaled_frame(ctx.params);
  const std::vector<double> k = rescaled_column(ctx, frame, t_rescaled);
  const std::vector<double>& lam = ctx.basis.lambdas();
  const int n3 = ctx.grid.N3();
  const int dim = 1 + n3;

  InertialVector y = make_inertial_vector(ctx);
  Eigen::MatrixXd block(dim, dim);
  Eigen::VectorXd rhs(dim), sol(dim);

  for (int q = 0; q < ctx.basis.mode_count(); ++q) {
    const double lambda = lam[q];
    const double cl = frame.a_c * lambda;

    block.setZero();
    block(0, 0) = 1.0 + h * h * lambda * lambda;
    for (int j = 0; j < n3; ++j) {
      block(0, 1 + j) = -h * h * cl * ctx.grid.moment_weight(j);
      block(1 + j, 0) = cl * ctx.grid.moment_weight(j);
      block(1 + j, 1 + j) = ctx.grid.weight(j);
    }
    // W + h S with S the flux-form tridiagonal built from k~.
    for (int j = 0; j + 1 < n3; ++j) {
      const double c = h * k[j] / ctx.grid.dx();
      block(1 + j, 1 + j) += c;
      block(1 + j + 1, 1 + j + 1) += c;
      block(1 + j, 1 + j + 1) -= c;
      block(1 + j + 1, 1 + j) -= c;
    }

    const double* rp = r.p.column(q);
    rhs[0] = r.w[q] + h * r.v[q];
    for (int j = 0; j < n3; ++j)
      rhs[1 + j] = ctx.grid.weight(j) * rp[j] +
                   cl * ctx.grid.moment_weight(j) * r.w[q];

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(block);
    sol = lu.solve(rhs);
    double resid = (block * sol - rhs).lpNorm<Eigen::Infinity>();
    double scale = rhs.lpNorm<Eigen::Infinity>() + 1e-300;
    if (!sol.allFinite() || resid > 1e-8 * scale) {
      int m = q / ctx.basis.N() + 1;
      int n = q % ctx.basis.N() + 1;
      throw SingularBlock("resolvent block for mode (" + std::to_string(m) +
                              "," + std::to_string(n) +
                              ") is numerically singular",
                          m, n);
    }

    y.w[q] = sol[0];
    y.v[q] = (sol[0] - r.w[q]) / h;
    double* yp = y.p.column(q);
    for (int j = 0; j < n3; ++j) yp[j] = sol[1 + j];
  }
  return y;
}

DenseGenerator build_dense_generator(const OperatorContext& ctx,
                                     double t_rescaled) {
  const int qn = ctx.basis.mode_count();
  const int n3 = ctx.grid.N3();
  const int dim = 2 * qn + qn * n3;

  auto pack = [&](const InertialVector& y, Eigen::VectorXd& out) {
    for (int q = 0; q < qn; ++q) {
      out[q] = y.w[q];
      out[qn + q] = y.v[q];
    }
    for (int i = 0; i < qn * n3; ++i) out[2 * qn + i] = y.p.val[i];
  };

  DenseGenerator d;
  d.t_rescaled = t_rescaled;
  d.A.resize(dim, dim);
  d.x_weights.resize(dim);

  InertialVector unit = make_inertial_vector(ctx);
  Eigen::VectorXd col(dim);
  for (int i = 0; i < dim; ++i) {
    double* slot = i < qn          ? &unit.w[i]
                   : i < 2 * qn    ? &unit.v[i - qn]
                                   : &unit.p.val[i - 2 * qn];
    *slot = 1.0;
    pack(apply_inertial_generator(ctx, unit, t_rescaled), col);
    d.A.col(i) = col;
    *slot = 0.0;
  }

  const std::vector<double>& lam = ctx.basis.lambdas();
  for (int q = 0; q < qn; ++q) {
    d.x_weights[q] = lam[q] * lam[q];
    d.x_weights[qn + q] = 1.0;
  }
  for (int q = 0; q < qn; ++q)
    for (int j = 0; j < n3; ++j)
      d.x_weights[2 * qn + q * n3 + j] = ctx.grid.weight(j);
  return d;
}

InertialState inertial_initial_state(const OperatorContext& ctx,
                                     const InitialData& init,
                                     const InertialOptions& opts) {
  const int qn = ctx.basis.mode_count();
  InertialState s;
  s.t = 0.0;
  s.w = make_plate_field(ctx.basis, PlateRole::Displacement);
  s.v = make_plate_field(ctx.basis, PlateRole::Velocity);

  auto copy_plate = [qn](const PlateField& src, PlateField& dst,
                         const char* what) {
    if (src.coef.empty()) return;  // absent = zero
    if (static_cast<int>(src.coef.size()) != qn)
      throw ValidationError(std::string(what) + ": mode count mismatch");
    dst.coef = src.coef;
  };
  copy_plate(init.w0, s.w, "initial displacement");
  copy_plate(init.w1, s.v, "initial velocity");

  if (init.field.M != ctx.basis.M() || init.field.N != ctx.basis.N() ||
      init.field.N3 != ctx.grid.N3())
    throw ValidationError("initial data / context shape mismatch");

  if (init.kind == InitialKind::Pressure) {
    s.p = init.field;
  } else {
    // Content-style datum: p(0) = (d0 + alpha x3 Lap w_c) / c_p with
    // Lap w_c = -lambda w_c per mode.
    const PlateField& wc = opts.d0_pairs_with_velocity ? s.v : s.w;
    const std::vector<double>& lam = ctx.basis.lambdas();
    s.p = make_pressure_field(ctx.basis, ctx.grid);
    for (int q = 0; q < qn; ++q) {
      const double* d0 = init.field.column(q);
      double* col = s.p.column(q);
      for (int j = 0; j < ctx.grid.N3(); ++j)
        col[j] = (d0[j] - ctx.params.alpha * lam[q] * wc.coef[q] *
                              ctx.grid.node(j)) /
                 ctx.params.c_p;
    }
  }
  s.energy = ctx.params.D * x_norm_sq(ctx, to_rescaled(ctx, s));
  return s;
}

namespace {

InertialVector step_rescaled(const OperatorContext& ctx,
                             const RescaledFrame& frame,
                             const InertialVector& y, double t_rescaled,
                             double h, const SourceTerms& sources,
                             TimeScheme scheme) {
  if (scheme == TimeScheme::BackwardEuler) {
    InertialVector r = y;
    add_scaled_sources(ctx, frame, sources, t_rescaled + h, h, r);
    return resolvent_apply(ctx, h, t_rescaled + h, r);
  }
  // Crank-Nicolson: (I - h/2 A(t~+h)) y' = y + h/2 A(t~) y + h F(t~+h/2).
  InertialVector ay = apply_inertial_generator(ctx, y, t_rescaled);
  InertialVector r = y;
  for (std::size_t q = 0; q < r.w.size(); ++q) {
    r.w[q] += 0.5 * h * ay.w[q];
    r.v[q] += 0.5 * h * ay.v[q];
  }
  axpy(0.5 * h, ay.p.val, r.p.val);
  add_scaled_sources(ctx, frame, sources, t_rescaled + 0.5 * h, h, r);
  return resolvent_apply(ctx, 0.5 * h, t_rescaled + h, r);
}

}  // namespace

InertialState inertial_step(const OperatorContext& ctx,
                            const InertialState& state, double tau,
                            const SourceTerms& sources,
                            const InertialOptions& opts) {
  if (!(tau > 0.0)) throw ValidationError("inertial_step: tau must be positive");
  const RescaledFrame frame = rescaled_frame(ctx.params);
  const double t_rescaled = state.t / frame.sigma;
  const double h = tau / frame.sigma;
  InertialVector y =
      step_rescaled(ctx, frame, to_rescaled(ctx, state), t_rescaled, h,
                    sources, opts.scheme);
  return to_physical(ctx, t_rescaled + h, y);
}

InertialRun run_inertial(const OperatorContext& ctx, const InitialData& init,
                         const SourceTerms& sources, double T, double tau,
                         const InertialOptions& opts) {
  const int nsteps = checked_step_count(T, tau);
  const RescaledFrame frame = rescaled_frame(ctx.params);
  const double h = tau / frame.sigma;

  // Under Crank-Nicolson the contraction argument averages the generator
  // at both endpoints, so it is only asserted when the coefficient
  // declares no time variation.
  const bool time_independent_k = !ctx.permeability.dt_envelope;
  const bool assert_energy =
      opts.assert_energy == EnergyAssert::On ||
      (opts.assert_energy == EnergyAssert::Auto &&
       sources_identically_zero(sources) &&
       (opts.scheme == TimeScheme::BackwardEuler || time_independent_k));

  InertialRun run;
  run.tau = tau;
  run.T = T;
  run.frame = frame;
  run.scheme = opts.scheme == TimeScheme::BackwardEuler ? "backward-euler"
                                                        : "crank-nicolson";

  InertialState state = inertial_initial_state(ctx, init, opts);
  run.energy_initial = state.energy;
  if (opts.observer) opts.observer(state);
  if (opts.store_trajectory) run.states.push_back(state);

  InertialVector y = to_rescaled(ctx, state);
  double energy_prev = state.energy;
  const double e_scale = std::max(state.energy, 1e-300);

  for (int n = 1; n <= nsteps; ++n) {
    const double t_rescaled = (n - 1) * h;
    try {
      y = step_rescaled(ctx, frame, y, t_rescaled, h, sources, opts.scheme);
    } catch (const Error& e) {
      throw StepError("step " + std::to_string(n) + "/" +
                      std::to_string(nsteps) + ": " + e.what());
    }
    InertialState next = to_physical(ctx, n * h, y);
    next.t = n * tau;  // avoid sigma * (t/sigma) rounding drift

    run.max_energy_increase = std::max(
        run.max_energy_increase, (next.energy - energy_prev) / e_scale);
    if (assert_energy && next.energy > energy_prev * (1.0 + 1e-9) + 1e-300)
      throw StepError("state energy increased from " +
                      std::to_string(energy_prev) + " to " +
                      std::to_string(next.energy) + " at step " +
                      std::to_string(n) + " with zero sources");
    energy_prev = next.energy;

    if (opts.observer) opts.observer(next);
    if (opts.store_trajectory)
      run.states.push_back(std::move(next));
    else if (n == nsteps)
      run.states.push_back(std::move(next));
  }
  return run;
}

BoundaryReport boundary_condition_check(const OperatorContext& ctx,
                                        const InertialState& state) {
  BoundaryReport rep;
  const int M = ctx.basis.M(), N = ctx.basis.N();
  const std::vector<double>& lam = ctx.basis.lambdas();

  // Sample |w| and |Lap w| along the four plate edges. The sine basis
  // vanishes there in exact arithmetic, so this measures representation
  // noise, scaled by the field size.
  const int samples = 33;
  double w_scale = plate_l2(state.w) + 1e-300;
  for (int side = 0; side < 4; ++side) {
    for (int i = 0; i <= samples; ++i) {
      double s = static_cast<double>(i) / samples;
      double x1 = side == 0 ? 0.0 : side == 1 ? 1.0 : s;
      double x2 = side == 2 ? 0.0 : side == 3 ? 1.0 : s;
      double wv = 0.0, lv = 0.0;
      for (int m = 1; m <= M; ++m)
        for (int n = 1; n <= N; ++n) {
          int q = ctx.basis.index(m, n);
          double basis_val =
              2.0 * std::sin(m * kPi * x1) * std::sin(n * kPi * x2);
          wv += state.w.coef[q] * basis_val;
          lv += lam[q] * state.w.coef[q] * basis_val;
        }
      rep.plate_edge_sup = std::max(rep.plate_edge_sup, std::abs(wv) / w_scale);
      rep.plate_lap_edge_sup =
          std::max(rep.plate_lap_edge_sup, std::abs(lv) / w_scale);
    }
  }

  // One-sided pressure flux at the faces, relative to the pressure norm.
  // For transversely flux-free solutions this decays first order in dx.
  const int n3 = ctx.grid.N3();
  double p_scale = pressure_l2(ctx.grid, state.p) + 1e-300;
  for (int q = 0; q < ctx.basis.mode_count(); ++q) {
    const double* col = state.p.column(q);
    rep.face_flux_bottom =
        std::max(rep.face_flux_bottom,
                 std::abs(col[1] - col[0]) / ctx.grid.dx() / p_scale);
    rep.face_flux_top =
        std::max(rep.face_flux_top,
                 std::abs(col[n3 - 1] - col[n3 - 2]) / ctx.grid.dx() / p_scale);
  }

  // Share of the state energy in the highest-order mode band (m = M or
  // n = N): a resolution indicator for the in-plane expansion.
  InertialVector y = to_rescaled(ctx, state);
  double total = x_norm_sq(ctx, y);
  double tail = 0.0;
  for (int m = 1; m <= M; ++m)
    for (int n = 1; n <= N; ++n) {
      if (m != M && n != N) continue;
      int q = ctx.basis.index(m, n);
      double part = lam[q] * lam[q] * y.w[q] * y.w[q] + y.v[q] * y.v[q];
      const double* col = y.p.column(q);
      for (int j = 0; j < n3; ++j)
        part += ctx.grid.weight(j) * col[j] * col[j];
      tail += part;
    }
  rep.modal_tail_fraction = tail / std::max(total, 1e-300);
  return rep;
}

}  // namespace poroplate

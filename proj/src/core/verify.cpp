#include "core/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "core/rng.hpp"

namespace poroplate {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

OperatorContext pinned_context(double c_p, double D, double alpha, double h,
                               int M, int N, int N3, double rho_p = 1.0,
                               PermeabilityModel k = permeability_constant(1.0)) {
  PhysicalParams params = PhysicalParams::create(D, alpha, c_p, rho_p, h);
  return make_context(params, M, N, N3, std::move(k));
}

PressureField random_pressure(const OperatorContext& ctx, Rng& rng) {
  PressureField p = make_pressure_field(ctx.basis, ctx.grid);
  for (double& v : p.val) v = rng.uniform(-1.0, 1.0);
  return p;
}

double rel_field_diff(const TransverseGrid& grid, const PressureField& a,
                      const PressureField& b) {
  PressureField d = a;
  axpy(-1.0, b.val, d.val);
  return pressure_l2(grid, d) / (pressure_l2(grid, b) + 1e-300);
}

void record_exception(CheckList& list, const std::string& suite) {
  CheckResult c;
  c.suite = suite;
  c.name = "exception";
  c.pass = false;
  c.value = std::numeric_limits<double>::quiet_NaN();
  c.bound = 0.0;
  list.checks.push_back(std::move(c));
}

}  // namespace

bool CheckList::all_pass() const {
  for (const CheckResult& c : checks)
    if (!c.pass) return false;
  return true;
}

void CheckList::add_upper(const std::string& suite, const std::string& name,
                          double value, double bound) {
  checks.push_back({suite, name, std::isfinite(value) && value <= bound,
                    value, bound});
}

void CheckList::add_lower(const std::string& suite, const std::string& name,
                          double value, double bound) {
  checks.push_back({suite, name, std::isfinite(value) && value >= bound,
                    value, bound});
}

void CheckList::add_window(const std::string& suite, const std::string& name,
                           double value, double center, double radius) {
  checks.push_back({suite, name,
                    std::isfinite(value) && std::abs(value - center) <= radius,
                    value, center});
}

void CheckList::append(const CheckList& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

std::string format_check(const CheckResult& c) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "CHECK %s.%s %s %.6e %.6e",
                c.suite.c_str(), c.name.c_str(), c.pass ? "PASS" : "FAIL",
                c.value, c.bound);
  return std::string(buf);
}

// --- manufactured cases ---------------------------------------------------

double ManufacturedQS::profile(double x3) const {
  return std::cos(kPi * (x3 + h) / (2.0 * h));
}

double ManufacturedQS::k_at(double t) const {
  return k_base + k_amp * std::sin(k_omega * t);
}

PermeabilityModel ManufacturedQS::permeability(double T) const {
  if (k_amp == 0.0) return permeability_constant(k_base);
  return permeability_sin_in_time(k_base, k_amp, k_omega, T);
}

SourceTerms ManufacturedQS::sources(const PhysicalParams& params) const {
  SourceTerms s;
  const ManufacturedQS self = *this;
  const double c_p = params.c_p;
  const double beta = params.beta;
  s.fluid_source = [self, c_p, beta](const SineBasis& basis,
                                     const TransverseGrid& grid, double t,
                                     PressureField& out) {
    out = make_pressure_field(basis, grid);
    const int plane = basis.index(self.m, self.n);
    const double decay = std::exp(-self.sigma * t);
    const double rate = kPi / (2.0 * self.h);
    double* col = out.column(plane);
    for (int j = 0; j < grid.N3(); ++j) {
      double P = self.profile(grid.node(j));
      col[j] = decay *
               (-self.sigma * (c_p * P + beta * self.kappa * grid.node(j)) +
                self.k_at(t) * rate * rate * P);
    }
  };
  return s;
}

InitialData ManufacturedQS::initial(const OperatorContext& ctx) const {
  InitialData init;
  init.kind = InitialKind::FluidContent;
  init.field = make_pressure_field(ctx.basis, ctx.grid);
  const int plane = ctx.basis.index(m, n);
  double* col = init.field.column(plane);
  for (int j = 0; j < ctx.grid.N3(); ++j) {
    double x3 = ctx.grid.node(j);
    col[j] = ctx.params.c_p * profile(x3) + ctx.params.beta * kappa * x3;
  }
  return init;
}

PressureField ManufacturedQS::exact_pressure(const OperatorContext& ctx,
                                             double t) const {
  PressureField p = make_pressure_field(ctx.basis, ctx.grid);
  const int plane = ctx.basis.index(m, n);
  double* col = p.column(plane);
  for (int j = 0; j < ctx.grid.N3(); ++j)
    col[j] = std::exp(-sigma * t) * profile(ctx.grid.node(j));
  return p;
}

double ManufacturedQS::exact_w_coef(const OperatorContext& ctx, double t) const {
  const double lambda = ctx.basis.lambdas()[ctx.basis.index(m, n)];
  return ctx.params.alpha * kappa * std::exp(-sigma * t) /
         (ctx.params.D * lambda);
}

double ManufacturedQS::pressure_error(const OperatorContext& ctx,
                                      const PressureField& p, double t) const {
  return rel_field_diff(ctx.grid, p, exact_pressure(ctx, t));
}

ManufacturedQS manufactured_qs_case(double h, double sigma, double k_base,
                                    double k_amp, double k_omega) {
  ManufacturedQS mc;
  mc.h = h;
  mc.sigma = sigma;
  mc.kappa = -8.0 * h * h / (kPi * kPi);
  mc.k_base = k_base;
  mc.k_amp = k_amp;
  mc.k_omega = k_omega;
  return mc;
}

double ManufacturedInertial::profile(double x3) const {
  return std::cos(kPi * (x3 + h) / (2.0 * h));
}

SourceTerms ManufacturedInertial::sources(const PhysicalParams& params) const {
  SourceTerms s;
  const ManufacturedInertial self = *this;
  const PhysicalParams prm = params;
  s.plate_load = [self, prm](const SineBasis& basis, double t,
                             PlateField& out) {
    out = make_plate_field(basis, PlateRole::Load);
    const int q = basis.index(self.m, self.n);
    const double lambda = basis.lambdas()[q];
    out.coef[q] =
        (prm.D * lambda * lambda - prm.rho_p * self.omega * self.omega) *
            self.A * std::cos(self.omega * t) -
        prm.alpha * lambda * self.kappa * std::exp(-self.mu * t);
  };
  s.fluid_source = [self, prm](const SineBasis& basis,
                               const TransverseGrid& grid, double t,
                               PressureField& out) {
    out = make_pressure_field(basis, grid);
    const int q = basis.index(self.m, self.n);
    const double lambda = basis.lambdas()[q];
    const double rate = kPi / (2.0 * self.h);
    double* col = out.column(q);
    for (int j = 0; j < grid.N3(); ++j) {
      double P = self.profile(grid.node(j));
      col[j] =
          std::exp(-self.mu * t) * (-prm.c_p * self.mu + rate * rate) * P -
          prm.alpha * lambda * self.A * self.omega * std::sin(self.omega * t) *
              grid.node(j);
    }
  };
  return s;
}

InitialData ManufacturedInertial::initial(const OperatorContext& ctx) const {
  InitialData init;
  init.kind = InitialKind::Pressure;
  init.field = make_pressure_field(ctx.basis, ctx.grid);
  double* col = init.field.column(ctx.basis.index(m, n));
  for (int j = 0; j < ctx.grid.N3(); ++j) col[j] = profile(ctx.grid.node(j));
  init.w0 = make_plate_field(ctx.basis, PlateRole::Displacement);
  init.w0.coef[ctx.basis.index(m, n)] = A;
  init.w1 = make_plate_field(ctx.basis, PlateRole::Velocity);
  return init;
}

double ManufacturedInertial::trajectory_error(const OperatorContext& ctx,
                                              const InertialRun& run) const {
  const int q = ctx.basis.index(m, n);
  double acc = 0.0;
  for (std::size_t i = 1; i < run.states.size(); ++i) {
    const InertialState& s = run.states[i];
    double ew = s.w.coef[q] - A * std::cos(omega * s.t);
    double ev = (s.v.coef[q] + A * omega * std::sin(omega * s.t)) / omega;
    double ep = 0.0;
    const double* col = s.p.column(q);
    for (int j = 0; j < ctx.grid.N3(); ++j) {
      double exact = std::exp(-mu * s.t) * profile(ctx.grid.node(j));
      ep += ctx.grid.weight(j) * (col[j] - exact) * (col[j] - exact);
    }
    acc += run.tau * (ew * ew + ev * ev + ep);
  }
  return std::sqrt(acc);
}

ManufacturedInertial manufactured_inertial_case(double h, double A,
                                                double omega, double mu) {
  ManufacturedInertial mc;
  mc.h = h;
  mc.A = A;
  mc.omega = omega;
  mc.mu = mu;
  mc.kappa = -8.0 * h * h / (kPi * kPi);
  return mc;
}

// --- studies ---------------------------------------------------------------

double fit_log_slope(const std::vector<double>& scale,
                     const std::vector<double>& err) {
  if (scale.size() != err.size() || scale.size() < 2)
    throw ValidationError("fit_log_slope: need matching series, length >= 2");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(scale.size());
  for (std::size_t i = 0; i < scale.size(); ++i) {
    double x = std::log(scale[i]);
    double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

/// Shared configuration for the manufactured-case convergence studies.
OperatorContext convergence_context(int N3) {
  return pinned_context(1.0, 1.0, 0.7, 0.5, 2, 2, N3);
}

}  // namespace

ConvergenceStudy qs_time_convergence(const std::vector<double>& taus, int N3,
                                     double T) {
  ManufacturedQS mc = manufactured_qs_case(0.5);
  OperatorContext ctx = convergence_context(N3);
  SourceTerms sources = mc.sources(ctx.params);
  InitialData init = mc.initial(ctx);
  QSOptions opts;
  opts.cg.tol = 1e-12;
  opts.store_trajectory = false;

  ConvergenceStudy study;
  for (double tau : taus) {
    QSRun run = qs_run(ctx, init, sources, T, tau, opts);
    study.scales.push_back(tau);
    study.errors.push_back(
        mc.pressure_error(ctx, run.states.back().p, T));
  }
  study.observed_order = fit_log_slope(study.scales, study.errors);
  return study;
}

ConvergenceStudy qs_space_convergence(const std::vector<int>& n3s, double tau,
                                      double T) {
  ManufacturedQS mc = manufactured_qs_case(0.5);
  QSOptions opts;
  opts.cg.tol = 1e-12;
  opts.store_trajectory = false;

  ConvergenceStudy study;
  for (int N3 : n3s) {
    OperatorContext ctx = convergence_context(N3);
    SourceTerms sources = mc.sources(ctx.params);
    QSRun run = qs_run(ctx, mc.initial(ctx), sources, T, tau, opts);
    study.scales.push_back(ctx.grid.dx());
    study.errors.push_back(mc.pressure_error(ctx, run.states.back().p, T));
  }
  study.observed_order = fit_log_slope(study.scales, study.errors);
  return study;
}

namespace {

/// Fixed smooth data for the stability ladder: decaying modal load,
/// oscillating fluid source, affine-in-x3 initial content.
SourceTerms ladder_sources() {
  SourceTerms s;
  s.plate_load = [](const SineBasis& basis, double t, PlateField& out) {
    out = make_plate_field(basis, PlateRole::Load);
    for (std::size_t q = 0; q < out.coef.size(); ++q)
      out.coef[q] = (1.0 + 0.5 * std::sin(t)) / (1.0 + static_cast<double>(q));
  };
  s.fluid_source = [](const SineBasis& basis, const TransverseGrid& grid,
                      double t, PressureField& out) {
    out = make_pressure_field(basis, grid);
    for (int q = 0; q < out.plane_count(); ++q) {
      double* col = out.column(q);
      double amp = std::cos(t) / ((1.0 + q) * (1.0 + q));
      for (int j = 0; j < grid.N3(); ++j)
        col[j] = amp * (0.5 + grid.node(j) * grid.node(j));
    }
  };
  return s;
}

InitialData ladder_initial(const OperatorContext& ctx) {
  InitialData init;
  init.kind = InitialKind::FluidContent;
  init.field = make_pressure_field(ctx.basis, ctx.grid);
  for (int q = 0; q < init.field.plane_count(); ++q) {
    double* col = init.field.column(q);
    for (int j = 0; j < ctx.grid.N3(); ++j)
      col[j] = (1.0 + ctx.grid.node(j)) / ((1.0 + q) * (1.0 + q));
  }
  return init;
}

}  // namespace

StabilityLadder stability_ladder() {
  const double T = 1.0;
  const std::vector<std::pair<double, int>> rungs = {
      {1.0 / 10.0, 17}, {1.0 / 20.0, 33}, {1.0 / 40.0, 65}, {1.0 / 80.0, 129}};

  StabilityLadder ladder;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& [tau, N3] : rungs) {
    OperatorContext ctx = pinned_context(1.0, 1.2, 0.8, 0.5, 2, 2, N3);
    SourceTerms sources = ladder_sources();
    QSOptions opts;
    opts.cg.tol = 1e-11;
    QSRun run = qs_run(ctx, ladder_initial(ctx), sources, T, tau, opts);
    StabilityReport rep = stability_report(ctx, run, sources);
    lo = std::min(lo, rep.ratio);
    hi = std::max(hi, rep.ratio);
    ladder.rungs.push_back(rep);
  }
  ladder.spread = hi / lo;
  return ladder;
}

// --- suites ----------------------------------------------------------------

CheckList verify_operator_identities() {
  const std::string suite = "operators";
  CheckList list;
  const double t0 = now_seconds();
  try {
    OperatorContext ctx = pinned_context(0.8, 1.1, 0.9, 0.5, 4, 4, 33);
    Rng rng(2026u);
    const double beta = ctx.params.beta;

    double adjoint = 0.0, symmetry = 0.0, energy_id = 0.0, diagram = 0.0;
    double min_quad = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 20; ++trial) {
      PressureField p = random_pressure(ctx, rng);
      PressureField q = random_pressure(ctx, rng);
      std::vector<double> s(ctx.basis.mode_count());
      for (double& v : s) v = rng.uniform(-1.0, 1.0);

      // (K p, s) = (p, lift s)_h, exactly by the moment weights.
      std::vector<double> mom = moment(ctx.grid, p);
      double lhs = 0.0, snorm = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        lhs += s[i] * mom[i];
        snorm += s[i] * s[i];
      }
      PressureField lift = lift_moment(ctx.basis, ctx.grid, s);
      double rhs = pressure_dot(ctx.grid, p, lift);
      double scale = std::sqrt(snorm) * pressure_l2(ctx.grid, p) + 1e-300;
      adjoint = std::max(adjoint, std::abs(lhs - rhs) / scale);

      PressureField bp = apply_B(ctx, p);
      PressureField bq = apply_B(ctx, q);
      double pl = pressure_l2(ctx.grid, p), ql = pressure_l2(ctx.grid, q);
      symmetry = std::max(
          symmetry, std::abs(pressure_dot(ctx.grid, bp, q) -
                             pressure_dot(ctx.grid, p, bq)) /
                        (beta * pl * ql + 1e-300));

      double quad = pressure_dot(ctx.grid, bp, p);
      double mom_sq = 0.0;
      for (double v : mom) mom_sq += v * v;
      energy_id = std::max(energy_id, std::abs(quad - beta * mom_sq) /
                                          (beta * pl * pl + 1e-300));
      min_quad = std::min(min_quad, quad / (beta * pl * pl + 1e-300));

      PressureField via = apply_B_via_diagram(ctx, p);
      axpy(-1.0, bp.val, via.val);
      diagram = std::max(diagram, pressure_l2(ctx.grid, via) /
                                      (beta * pl + 1e-300));
    }
    list.add_upper(suite, "moment_adjoint", adjoint, 1e-13);
    list.add_upper(suite, "feedback_symmetry", symmetry, 1e-13);
    list.add_upper(suite, "feedback_energy_identity", energy_id, 1e-13);
    list.add_lower(suite, "feedback_nonnegative", min_quad, -1e-13);
    list.add_upper(suite, "diagram_collapse", diagram, 1e-12);
  } catch (const std::exception&) {
    record_exception(list, suite);
  }
  list.add_upper(suite, "runtime_seconds", now_seconds() - t0, 1.0);
  return list;
}

CheckList verify_coercivity() {
  const std::string suite = "coercivity";
  CheckList list;
  try {
    // Quadratic form ((c_p I + B) p, p) + 2 (A(t) p, p) against the floor
    // min(c_p, k_lower) times the full V-norm squared, on random fields
    // and random times for the oscillating-in-time coefficient.
    const double T = 1.0;
    PermeabilityModel k = permeability_sin_in_time(1.0, 0.5, 2.0 * kPi, T);
    const double k_lower = k.k_lower;
    OperatorContext ctx = pinned_context(1.0, 1.0, 0.8, 0.5, 3, 3, 33, 1.0, k);
    const double floor = std::min(ctx.params.c_p, k_lower);
    Rng rng(7u);
    std::vector<double> times(8);
    for (double& t : times) t = rng.uniform(0.0, T);

    double min_ratio = std::numeric_limits<double>::infinity();
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
      PressureField p = random_pressure(ctx, rng);
      double content = pressure_dot(ctx.grid, apply_fluid_content(ctx, p), p);
      double vnorm = pressure_v_norm(ctx.grid, p);
      for (double t : times) {
        double form = content + 2.0 * diffusion_form(ctx, p, p, t);
        double ratio = form / (vnorm * vnorm + 1e-300);
        min_ratio = std::min(min_ratio, ratio);
        if (ratio < floor * (1.0 - 1e-12)) ++violations;
      }
    }
    list.add_lower(suite, "form_floor", min_ratio, floor);
    list.add_upper(suite, "violations", static_cast<double>(violations), 0.0);
  } catch (const std::exception&) {
    record_exception(list, suite);
  }
  return list;
}

CheckList verify_dense_oracle() {
  const std::string suite = "oracle";
  CheckList list;
  const double t0 = now_seconds();
  try {
    PermeabilityModel k = permeability_sin_in_time(1.0, 0.3, 1.5, 10.0);
    OperatorContext ctx = pinned_context(0.7, 1.2, 0.9, 0.5, 2, 2, 9, 2.5, k);
    Rng rng(17u);
    const double t_eval = 0.4;
    DenseOracle oracle = build_dense_oracle(ctx, t_eval);
    const int dim = static_cast<int>(oracle.A.rows());

    double a_diff = 0.0, b_diff = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      PressureField p = random_pressure(ctx, rng);
      Eigen::VectorXd v(dim);
      for (int i = 0; i < dim; ++i) v[i] = p.val[i];

      PressureField ap = apply_A(ctx, p, t_eval);
      Eigen::VectorXd av = oracle.A * v;
      double num = 0.0, den = 0.0;
      for (int i = 0; i < dim; ++i) {
        num += (ap.val[i] - av[i]) * (ap.val[i] - av[i]);
        den += av[i] * av[i];
      }
      a_diff = std::max(a_diff, std::sqrt(num / (den + 1e-300)));

      PressureField bp = apply_B(ctx, p);
      Eigen::VectorXd bv = oracle.B * v;
      num = den = 0.0;
      for (int i = 0; i < dim; ++i) {
        num += (bp.val[i] - bv[i]) * (bp.val[i] - bv[i]);
        den += bv[i] * bv[i];
      }
      b_diff = std::max(b_diff, std::sqrt(num / (den + 1e-300)));
    }
    list.add_upper(suite, "diffusion_matches_dense", a_diff, 1e-11);
    list.add_upper(suite, "feedback_matches_dense", b_diff, 1e-11);

    // Content inversion against a dense LU solve.
    {
      PressureField d = random_pressure(ctx, rng);
      CgOptions cg;
      cg.tol = 1e-13;
      PressureField p = invert_fluid_content(ctx, d, cg);
      Eigen::VectorXd dv(dim);
      for (int i = 0; i < dim; ++i) dv[i] = d.val[i];
      Eigen::VectorXd pv = oracle.content.partialPivLu().solve(dv);
      double num = 0.0, den = 0.0;
      for (int i = 0; i < dim; ++i) {
        num += (p.val[i] - pv[i]) * (p.val[i] - pv[i]);
        den += pv[i] * pv[i];
      }
      list.add_upper(suite, "content_inverse", std::sqrt(num / den), 1e-11);
    }

    // One implicit quasi-static step against the dense assembled system.
    {
      SourceTerms sources;
      sources.plate_load = [](const SineBasis& basis, double t,
                              PlateField& out) {
        out = make_plate_field(basis, PlateRole::Load);
        for (std::size_t q = 0; q < out.coef.size(); ++q)
          out.coef[q] = 0.3 * (1.0 + t) * static_cast<double>(q + 1);
      };
      sources.fluid_source = [](const SineBasis& basis,
                                const TransverseGrid& grid, double t,
                                PressureField& out) {
        out = make_pressure_field(basis, grid);
        for (std::size_t i = 0; i < out.val.size(); ++i)
          out.val[i] = std::cos(t + 0.1 * static_cast<double>(i % 11));
      };
      const double tau = 0.01;
      InitialData init;
      init.kind = InitialKind::Pressure;
      init.field = random_pressure(ctx, rng);
      QSOptions opts;
      opts.cg.tol = 1e-13;
      QSState s0 = qs_initial_state(ctx, init, sources, opts);
      PlateField f0 = eval_plate_load(sources, ctx.basis, 0.0);
      PlateField f1 = eval_plate_load(sources, ctx.basis, tau);
      PressureField g1 = eval_fluid_source(sources, ctx.basis, ctx.grid, tau);
      QSState s1 = qs_step(ctx, s0, tau, g1, f1, f0, opts);

      DenseOracle step_oracle = build_dense_oracle(ctx, tau);
      PressureField gf0 = load_content_lift(ctx, f0);
      PressureField gf1 = load_content_lift(ctx, f1);
      Eigen::VectorXd p0(dim), g(dim), l0(dim), l1(dim);
      for (int i = 0; i < dim; ++i) {
        p0[i] = init.field.val[i];
        g[i] = g1.val[i];
        l0[i] = gf0.val[i];
        l1[i] = gf1.val[i];
      }
      Eigen::VectorXd rhs = step_oracle.content * p0 + tau * g + l0 - l1;
      Eigen::MatrixXd lhs = step_oracle.content + tau * step_oracle.A;
      Eigen::VectorXd p1 = lhs.partialPivLu().solve(rhs);
      double num = 0.0, den = 0.0;
      for (int i = 0; i < dim; ++i) {
        num += (s1.p.val[i] - p1[i]) * (s1.p.val[i] - p1[i]);
        den += p1[i] * p1[i];
      }
      list.add_upper(suite, "implicit_step", std::sqrt(num / den), 1e-11);
    }

    // Inertial resolvent blocks against the dense stacked solve.
    {
      const double h = 0.05, t_rescaled = 0.4;
      DenseGenerator dg = build_dense_generator(ctx, t_rescaled);
      const int sdim = static_cast<int>(dg.A.rows());
      Eigen::MatrixXd lhs =
          Eigen::MatrixXd::Identity(sdim, sdim) - h * dg.A;

      InertialVector r = make_inertial_vector(ctx);
      for (double& v : r.w) v = rng.uniform(-1.0, 1.0);
      for (double& v : r.v) v = rng.uniform(-1.0, 1.0);
      for (double& v : r.p.val) v = rng.uniform(-1.0, 1.0);

      const int qn = ctx.basis.mode_count();
      Eigen::VectorXd rv(sdim);
      for (int q = 0; q < qn; ++q) {
        rv[q] = r.w[q];
        rv[qn + q] = r.v[q];
      }
      for (std::size_t i = 0; i < r.p.val.size(); ++i)
        rv[2 * qn + static_cast<int>(i)] = r.p.val[i];
      Eigen::VectorXd sol = lhs.partialPivLu().solve(rv);

      InertialVector y = resolvent_apply(ctx, h, t_rescaled, r);
      double num = 0.0, den = 0.0;
      for (int q = 0; q < qn; ++q) {
        num += (y.w[q] - sol[q]) * (y.w[q] - sol[q]) +
               (y.v[q] - sol[qn + q]) * (y.v[q] - sol[qn + q]);
        den += sol[q] * sol[q] + sol[qn + q] * sol[qn + q];
      }
      for (std::size_t i = 0; i < y.p.val.size(); ++i) {
        double d = y.p.val[i] - sol[2 * qn + static_cast<int>(i)];
        num += d * d;
        den += sol[2 * qn + static_cast<int>(i)] *
               sol[2 * qn + static_cast<int>(i)];
      }
      list.add_upper(suite, "resolvent_step", std::sqrt(num / den), 1e-11);
    }
  } catch (const std::exception&) {
    record_exception(list, suite);
  }
  list.add_upper(suite, "runtime_seconds", now_seconds() - t0, 5.0);
  return list;
}

CheckList verify_qs_convergence() {
  const std::string suite = "convergence";
  CheckList list;
  const double t0 = now_seconds();
  try {
    ConvergenceStudy time_study = qs_time_convergence(
        {1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0}, 129, 0.5);
    list.add_window(suite, "time_order", time_study.observed_order, 1.0, 0.2);

    ConvergenceStudy space_study =
        qs_space_convergence({9, 17, 33, 65}, 1e-4, 0.01);
    list.add_window(suite, "space_order", space_study.observed_order, 2.0, 0.2);
  } catch (const std::exception&) {
    record_exception(list, suite);
  }
  list.add_upper(suite, "runtime_seconds", now_seconds() - t0, 60.0);
  return list;
}

CheckList verify_energy_monotonicity() {
  const std::string suite = "energy";
  CheckList list;
  try {
    const double tau = 0.002, T = 1.0;  // 500 steps
    Rng rng(41u);

    auto qs_case = [&](PermeabilityModel k, const char* name) {
      OperatorContext ctx =
          pinned_context(1.0, 1.0, 0.8, 0.5, 3, 3, 17, 1.0, std::move(k));
      InitialData init;
      init.kind = InitialKind::FluidContent;
      init.field = random_pressure(ctx, rng);
      QSOptions opts;
      opts.cg.tol = 1e-12;
      opts.store_trajectory = false;
      QSRun run = qs_run(ctx, init, SourceTerms{}, T, tau, opts);
      list.add_upper(suite, name, run.max_energy_increase, 1e-10);
    };
    qs_case(permeability_constant(1.0), "quasistatic_constant_k");
    qs_case(permeability_sin_in_time(1.0, 0.5, 4.0, T),
            "quasistatic_time_dependent_k");

    auto inertial_case = [&](PermeabilityModel k, const char* name) {
      OperatorContext ctx =
          pinned_context(1.0, 1.0, 0.8, 0.5, 3, 3, 17, 2.0, std::move(k));
      InitialData init;
      init.kind = InitialKind::Pressure;
      init.field = random_pressure(ctx, rng);
      init.w0 = make_plate_field(ctx.basis, PlateRole::Displacement);
      init.w1 = make_plate_field(ctx.basis, PlateRole::Velocity);
      for (double& v : init.w0.coef) v = rng.uniform(-1.0, 1.0);
      for (double& v : init.w1.coef) v = rng.uniform(-1.0, 1.0);
      InertialOptions opts;
      opts.store_trajectory = false;
      InertialRun run = run_inertial(ctx, init, SourceTerms{}, T, tau, opts);
      list.add_upper(suite, name, run.max_energy_increase, 1e-11);
    };
    inertial_case(permeability_constant(1.0), "inertial_constant_k");
    inertial_case(permeability_sin_in_time(1.0, 0.5, 4.0, T),
                  "inertial_time_dependent_k");
  } catch (const std::exception&) {
    record_exception(list, suite);
  }
  return list;
}

CheckList verify_dissipativity() {
  const std::string suite = "dissipativity";
  CheckList list;
  try {
    Rng rng(53u);
    double identity_gap = 0.0, max_sign = -std::numeric_limits<double>::infinity();
    const std::vector<double> times = {0.0, 0.15, 0.4, 0.77, 1.3};

    auto sample = [&](const OperatorContext& ctx, int count) {
      for (int trial = 0; trial < count; ++trial) {
        InertialVector y = make_inertial_vector(ctx);
        for (double& v : y.w) v = rng.uniform(-1.0, 1.0);
        for (double& v : y.v) v = rng.uniform(-1.0, 1.0);
        for (double& v : y.p.val) v = rng.uniform(-1.0, 1.0);
        double t = times[trial % times.size()];
        InertialVector ay = apply_inertial_generator(ctx, y, t);
        double lhs = x_dot(ctx, ay, y);
        double diss = dissipation_form(ctx, y, t);
        double norm = x_norm_sq(ctx, y);
        identity_gap = std::max(identity_gap, std::abs(lhs + diss) / norm);
        max_sign = std::max(max_sign, lhs / norm);
      }
    };
    sample(pinned_context(0.7, 2.3, 0.9, 0.5, 2, 2, 17, 1.7,
                          permeability_layered_x3(0.5, 2.0)),
           50);
    sample(pinned_context(1.0, 1.0, 0.8, 0.4, 3, 3, 17, 2.0,
                          permeability_sin_in_time(1.0, 0.4, 2.0, 10.0)),
           50);

    list.add_upper(suite, "sign_identity", identity_gap, 1e-11);
    list.add_upper(suite, "nonpositive_rate", max_sign, 1e-11);
  } catch (const std::exception&) {
    record_exception(list, suite);
  }
  return list;
}

CheckList verify_weak_residual() {
  const std::string suite = "weakform";
  CheckList list;
  try {
    ManufacturedQS mc = manufactured_qs_case(0.5);
    const double T = 0.5;
    const std::vector<std::pair<double, int>> rungs = {
        {1.0 / 10.0, 17}, {1.0 / 20.0, 33}, {1.0 / 40.0, 65}};

    std::vector<double> residuals;
    double plate_rows = 0.0, bounded = 0.0;
    for (const auto& [tau, N3] : rungs) {
      OperatorContext ctx = convergence_context(N3);
      SourceTerms sources = mc.sources(ctx.params);
      QSOptions opts;
      opts.cg.tol = 1e-12;
      QSRun run = qs_run(ctx, mc.initial(ctx), sources, T, tau, opts);
      ResidualReport rep = weak_residual(ctx, run, sources);
      residuals.push_back(rep.max_pressure_residual);
      plate_rows = std::max(plate_rows, rep.max_plate_residual);
      double budget = tau + 1.0 / (static_cast<double>(N3) * N3);
      bounded = std::max(bounded, rep.max_pressure_residual / budget);
    }
    double worst_ratio = 0.0;
    for (std::size_t i = 1; i < residuals.size(); ++i)
      worst_ratio = std::max(worst_ratio, residuals[i] / residuals[i - 1]);

    list.add_upper(suite, "plate_rows", plate_rows, 1e-12);
    list.add_upper(suite, "scaled_bound", bounded, 2.0);
    list.add_upper(suite, "monotone_decay", worst_ratio, 1.0);
  } catch (const std::exception&) {
    record_exception(list, suite);
  }
  return list;
}

CheckList verify_stability_ladder() {
  const std::string suite = "stability";
  CheckList list;
  try {
    StabilityLadder ladder = stability_ladder();
    list.add_upper(suite, "ratio_spread", ladder.spread, 2.0);
    double max_ratio = 0.0;
    for (const StabilityReport& r : ladder.rungs)
      max_ratio = std::max(max_ratio, r.ratio);
    list.add_upper(suite, "ratio_finite", max_ratio,
                   std::numeric_limits<double>::max());
  } catch (const std::exception&) {
    record_exception(list, suite);
  }
  return list;
}

CheckList verify_initial_equivalence() {
  const std::string suite = "initial";
  CheckList list;
  try {
    OperatorContext ctx = pinned_context(0.9, 1.3, 0.8, 0.5, 2, 2, 33);
    Rng rng(71u);
    const double cg_tol = 1e-12;
    QSOptions opts;
    opts.cg.tol = cg_tol;

    double round_trip = 0.0;
    double sandwich_lo = std::numeric_limits<double>::infinity();
    double sandwich_hi = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      InitialData init;
      init.kind = InitialKind::FluidContent;
      init.field = random_pressure(ctx, rng);
      QSState s0 = qs_initial_state(ctx, init, SourceTerms{}, opts);
      round_trip = std::max(
          round_trip, rel_field_diff(ctx.grid, s0.zeta, init.field));
      double ratio = pressure_l2(ctx.grid, s0.p) /
                     pressure_l2(ctx.grid, init.field);
      sandwich_lo = std::min(sandwich_lo, ratio);
      sandwich_hi = std::max(sandwich_hi, ratio);
    }
    list.add_upper(suite, "content_round_trip", round_trip, 10.0 * cg_tol);

    const double h = ctx.params.h;
    const double c = 1.0 / (ctx.params.c_p +
                            ctx.params.beta * 2.0 * h * h * h / 3.0 + 1e-9);
    list.add_lower(suite, "norm_sandwich_lower", sandwich_lo, c);
    list.add_upper(suite, "norm_sandwich_upper", sandwich_hi,
                   1.0 / ctx.params.c_p);

    // Reverse direction: a given pressure, its induced content, and back.
    double reverse = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      PressureField p0 = random_pressure(ctx, rng);
      PressureField d = apply_fluid_content(ctx, p0);
      CgOptions cg;
      cg.tol = cg_tol;
      PressureField back = invert_fluid_content(ctx, d, cg);
      reverse = std::max(reverse, rel_field_diff(ctx.grid, back, p0));
    }
    list.add_upper(suite, "pressure_round_trip", reverse, 10.0 * cg_tol);
  } catch (const std::exception&) {
    record_exception(list, suite);
  }
  return list;
}

CheckList verify_translation_equivalence() {
  const std::string suite = "translation";
  CheckList list;
  try {
    OperatorContext ctx = pinned_context(0.9, 1.4, 0.8, 0.5, 3, 2, 17);
    SourceTerms sources;
    sources.plate_load = [](const SineBasis& basis, double t, PlateField& out) {
      out = make_plate_field(basis, PlateRole::Load);
      for (std::size_t q = 0; q < out.coef.size(); ++q)
        out.coef[q] = (1.0 + t * t) * std::sin(1.0 + static_cast<double>(q));
    };
    sources.fluid_source = [](const SineBasis& basis,
                              const TransverseGrid& grid, double t,
                              PressureField& out) {
      out = make_pressure_field(basis, grid);
      for (std::size_t i = 0; i < out.val.size(); ++i)
        out.val[i] =
            0.4 * std::cos(t) * std::sin(0.3 * static_cast<double>(i % 7));
    };
    Rng rng(29u);
    InitialData init;
    init.kind = InitialKind::FluidContent;
    init.field = random_pressure(ctx, rng);

    const double cg_tol = 1e-12;
    QSOptions opts;
    opts.cg.tol = cg_tol;
    const double T = 0.3, tau = 0.01;
    QSRun direct = qs_run(ctx, init, sources, T, tau, opts);
    QSRun translated = qs_run_translated(ctx, init, sources, T, tau, opts);

    double worst = 0.0;
    for (std::size_t n = 0; n < direct.states.size(); ++n) {
      worst = std::max(worst, rel_field_diff(ctx.grid, translated.states[n].p,
                                             direct.states[n].p));
      PlateField dw = translated.states[n].w;
      for (std::size_t i = 0; i < dw.coef.size(); ++i)
        dw.coef[i] -= direct.states[n].w.coef[i];
      worst = std::max(worst, plate_l2(dw) /
                                  (plate_l2(direct.states[n].w) + 1e-300));
      worst = std::max(worst,
                       rel_field_diff(ctx.grid, translated.states[n].zeta,
                                      direct.states[n].zeta));
    }
    list.add_upper(suite, "trajectory_match", worst, 10.0 * cg_tol);
    list.add_upper(suite, "translated_plate_identity",
                   translated.max_plate_residual, 1e-10);
  } catch (const std::exception&) {
    record_exception(list, suite);
  }
  return list;
}

CheckList verify_all() {
  CheckList list;
  list.append(verify_operator_identities());
  list.append(verify_coercivity());
  list.append(verify_dense_oracle());
  list.append(verify_qs_convergence());
  list.append(verify_energy_monotonicity());
  list.append(verify_dissipativity());
  list.append(verify_weak_residual());
  list.append(verify_stability_ladder());
  list.append(verify_initial_equivalence());
  list.append(verify_translation_equivalence());
  return list;
}

}  // namespace poroplate

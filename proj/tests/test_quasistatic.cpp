#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "core/quasistatic.hpp"
#include "core/rng.hpp"
#include "support/oracles.hpp"

using namespace poroplate;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

OperatorContext small_context(double c_p, double D, double alpha, double h,
                              int M, int N, int N3,
                              PermeabilityModel k = permeability_constant(1.0)) {
  PhysicalParams params = PhysicalParams::create(D, alpha, c_p, 1.0, h);
  return make_context(params, M, N, N3, std::move(k));
}

PressureField random_pressure(const OperatorContext& ctx, unsigned seed) {
  Rng rng(seed);
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

double rel_plate_diff(const PlateField& a, const PlateField& b) {
  PlateField d = a;
  for (std::size_t i = 0; i < d.coef.size(); ++i) d.coef[i] -= b.coef[i];
  return plate_l2(d) / (plate_l2(b) + 1e-300);
}

/// Closed-form single-mode solution used as an accuracy yardstick:
///   p(t, x) = exp(-sigma t) cos(pi (x3 + h) / (2h)) phi_mn,
/// load f = 0, fluid source chosen so the pair solves the system exactly.
struct ManufacturedCase {
  int m = 1, n = 1;
  double sigma = 1.0;
  double h = 0.5;
  double kappa;  ///< transverse moment of the cosine profile: -8 h^2 / pi^2

  explicit ManufacturedCase(double h_) : h(h_), kappa(-8.0 * h_ * h_ / (kPi * kPi)) {}

  double profile(double x3) const { return std::cos(kPi * (x3 + h) / (2.0 * h)); }

  SourceTerms sources(const PhysicalParams& params,
                      const std::function<double(double)>& k_of_t) const {
    SourceTerms s;
    const ManufacturedCase self = *this;
    const double c_p = params.c_p;
    const double beta = params.beta;
    s.fluid_source = [self, c_p, beta, k_of_t](const SineBasis& basis,
                                               const TransverseGrid& grid,
                                               double t, PressureField& out) {
      out = make_pressure_field(basis, grid);
      const int plane = basis.index(self.m, self.n);
      const double decay = std::exp(-self.sigma * t);
      const double rate = kPi / (2.0 * self.h);
      double* col = out.column(plane);
      for (int j = 0; j < grid.N3(); ++j) {
        double P = self.profile(grid.node(j));
        col[j] = decay * (-self.sigma * (c_p * P + beta * self.kappa * grid.node(j)) +
                          k_of_t(t) * rate * rate * P);
      }
    };
    return s;
  }

  InitialData initial(const OperatorContext& ctx) const {
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

  PressureField exact_pressure(const OperatorContext& ctx, double t) const {
    PressureField p = make_pressure_field(ctx.basis, ctx.grid);
    const int plane = ctx.basis.index(m, n);
    double* col = p.column(plane);
    for (int j = 0; j < ctx.grid.N3(); ++j)
      col[j] = std::exp(-sigma * t) * profile(ctx.grid.node(j));
    return p;
  }

  double exact_w_coef(const OperatorContext& ctx, double t) const {
    const double lambda = ctx.basis.lambdas()[ctx.basis.index(m, n)];
    return ctx.params.alpha * kappa * std::exp(-sigma * t) /
           (ctx.params.D * lambda);
  }
};

}  // namespace

TEST_CASE("manufactured case: transverse moment of the cosine profile") {
  const double h = 0.5;
  double kappa = oracle::integrate(
      [h](double x) { return x * std::cos(kPi * (x + h) / (2.0 * h)); }, -h, h);
  CHECK(std::abs(kappa - (-8.0 * h * h / (kPi * kPi))) < 1e-12);
}

TEST_CASE("initial state inverts the content map") {
  OperatorContext ctx = small_context(0.8, 1.3, 0.6, 0.5, 3, 3, 17);
  InitialData init;
  init.kind = InitialKind::FluidContent;
  init.field = random_pressure(ctx, 41u);

  QSOptions opts;
  opts.cg.tol = 1e-12;
  QSState s0 = qs_initial_state(ctx, init, SourceTerms{}, opts);
  CHECK(s0.t == 0.0);
  // zeta(0) must reproduce d0 within a small multiple of the CG tolerance.
  CHECK(rel_field_diff(ctx.grid, s0.zeta, init.field) < 1e-11);
  CHECK(s0.energy > 0.0);
}

TEST_CASE("initial state honours a directly-given pressure") {
  OperatorContext ctx = small_context(1.1, 0.9, 0.5, 0.4, 2, 2, 9);
  InitialData init;
  init.kind = InitialKind::Pressure;
  init.field = random_pressure(ctx, 42u);

  SourceTerms sources;
  sources.plate_load = [](const SineBasis& basis, double, PlateField& out) {
    out = make_plate_field(basis, PlateRole::Load);
    out.coef[0] = 2.0;
  };

  QSState s0 = qs_initial_state(ctx, init, sources, {});
  CHECK(rel_field_diff(ctx.grid, s0.p, init.field) == 0.0);

  // zeta(0) = (c_p I + B) p0 + G f(0), assembled independently.
  PressureField expect = apply_fluid_content(ctx, init.field);
  PlateField f0 = eval_plate_load(sources, ctx.basis, 0.0);
  axpy(1.0, load_content_lift(ctx, f0).val, expect.val);
  CHECK(rel_field_diff(ctx.grid, s0.zeta, expect) < 1e-13);
}

TEST_CASE("one implicit step matches the dense-matrix solve") {
  OperatorContext ctx = small_context(0.7, 1.2, 0.9, 0.5, 2, 2, 9);
  const double tau = 0.01;

  InitialData init;
  init.kind = InitialKind::Pressure;
  init.field = random_pressure(ctx, 7u);

  SourceTerms sources;
  sources.plate_load = [](const SineBasis& basis, double t, PlateField& out) {
    out = make_plate_field(basis, PlateRole::Load);
    for (std::size_t q = 0; q < out.coef.size(); ++q)
      out.coef[q] = 0.3 * (1.0 + t) * static_cast<double>(q + 1);
  };
  sources.fluid_source = [](const SineBasis& basis, const TransverseGrid& grid,
                            double t, PressureField& out) {
    out = make_pressure_field(basis, grid);
    for (std::size_t i = 0; i < out.val.size(); ++i)
      out.val[i] = std::cos(t + 0.1 * static_cast<double>(i % 11));
  };

  QSOptions opts;
  opts.cg.tol = 1e-13;
  QSState s0 = qs_initial_state(ctx, init, sources, opts);
  PlateField f0 = eval_plate_load(sources, ctx.basis, 0.0);
  PlateField f1 = eval_plate_load(sources, ctx.basis, tau);
  PressureField g1 = eval_fluid_source(sources, ctx.basis, ctx.grid, tau);
  QSState s1 = qs_step(ctx, s0, tau, g1, f1, f0, opts);

  // Dense route: (content + tau A(tau)) p1 = content p0 + tau g1 + Gf0 - Gf1.
  DenseOracle oracle = build_dense_oracle(ctx, tau);
  const int n = static_cast<int>(init.field.val.size());
  Eigen::VectorXd p0(n), g(n), lift0(n), lift1(n);
  PressureField gf0 = load_content_lift(ctx, f0);
  PressureField gf1 = load_content_lift(ctx, f1);
  for (int i = 0; i < n; ++i) {
    p0[i] = init.field.val[i];
    g[i] = g1.val[i];
    lift0[i] = gf0.val[i];
    lift1[i] = gf1.val[i];
  }
  Eigen::VectorXd rhs = oracle.content * p0 + tau * g + lift0 - lift1;
  Eigen::MatrixXd lhs = oracle.content + tau * oracle.A;
  Eigen::VectorXd p1 = lhs.partialPivLu().solve(rhs);

  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (s1.p.val[i] - p1[i]) * (s1.p.val[i] - p1[i]);
    den += p1[i] * p1[i];
  }
  CHECK(std::sqrt(num / den) < 1e-10);
}

TEST_CASE("content energy decays without sources") {
  SUBCASE("constant permeability") {
    OperatorContext ctx = small_context(1.0, 1.0, 0.8, 0.5, 3, 3, 17);
    InitialData init;
    init.kind = InitialKind::FluidContent;
    init.field = random_pressure(ctx, 19u);

    QSOptions opts;
    opts.cg.tol = 1e-12;
    QSRun run = qs_run(ctx, init, SourceTerms{}, 0.5, 0.01, opts);
    CHECK(run.states.size() == 51);
    CHECK(run.max_energy_increase <= 1e-10);
    CHECK(run.states.back().energy < run.energy_initial);
    CHECK(run.max_plate_residual < 1e-10);
  }
  SUBCASE("time-dependent permeability") {
    OperatorContext ctx = small_context(
        1.0, 1.0, 0.8, 0.5, 2, 2, 17,
        permeability_sin_in_time(1.0, 0.5, 2.0 * kPi, 1.0));
    InitialData init;
    init.kind = InitialKind::FluidContent;
    init.field = random_pressure(ctx, 23u);

    QSOptions opts;
    opts.cg.tol = 1e-12;
    opts.assert_energy = EnergyAssert::On;
    QSRun run = qs_run(ctx, init, SourceTerms{}, 1.0, 0.02, opts);
    CHECK(run.max_energy_increase <= 1e-10);
  }
}

TEST_CASE("manufactured solution: accuracy and first-order-in-time behaviour") {
  const double h = 0.5;
  ManufacturedCase mc(h);
  OperatorContext ctx = small_context(1.0, 1.0, 0.7, h, 2, 2, 129);
  SourceTerms sources = mc.sources(ctx.params, [](double) { return 1.0; });
  InitialData init = mc.initial(ctx);

  QSOptions opts;
  opts.cg.tol = 1e-12;
  const double T = 0.5;

  auto final_error = [&](double tau) {
    QSRun run = qs_run(ctx, init, sources, T, tau, opts);
    PressureField exact = mc.exact_pressure(ctx, T);
    double err = rel_field_diff(ctx.grid, run.states.back().p, exact);
    // The plate coefficient must track its closed form as well.
    const int plane = ctx.basis.index(mc.m, mc.n);
    double w_err = std::abs(run.states.back().w.coef[plane] -
                            mc.exact_w_coef(ctx, T));
    CHECK(w_err < 1e-2 * std::abs(mc.exact_w_coef(ctx, T)) + 1e-14);
    return err;
  };

  double coarse = final_error(1.0 / 20.0);
  double fine = final_error(1.0 / 40.0);
  CHECK(coarse < 0.05);
  CHECK(fine < coarse);
  double ratio = coarse / fine;
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.7);
}

TEST_CASE("load translation reproduces the direct trajectory") {
  OperatorContext ctx = small_context(0.9, 1.4, 0.8, 0.5, 3, 2, 17);

  SourceTerms sources;
  sources.plate_load = [](const SineBasis& basis, double t, PlateField& out) {
    out = make_plate_field(basis, PlateRole::Load);
    for (std::size_t q = 0; q < out.coef.size(); ++q)
      out.coef[q] = (1.0 + t * t) * std::sin(1.0 + static_cast<double>(q));
  };
  sources.fluid_source = [](const SineBasis& basis, const TransverseGrid& grid,
                            double t, PressureField& out) {
    out = make_pressure_field(basis, grid);
    for (std::size_t i = 0; i < out.val.size(); ++i)
      out.val[i] = 0.4 * std::cos(t) * std::sin(0.3 * static_cast<double>(i % 7));
  };

  InitialData init;
  init.kind = InitialKind::FluidContent;
  init.field = random_pressure(ctx, 71u);

  QSOptions opts;
  opts.cg.tol = 1e-12;
  const double T = 0.3, tau = 0.01;
  QSRun direct = qs_run(ctx, init, sources, T, tau, opts);
  QSRun translated = qs_run_translated(ctx, init, sources, T, tau, opts);

  CHECK(direct.path == "direct");
  CHECK(translated.path == "translated");
  REQUIRE(direct.states.size() == translated.states.size());

  // Identical linear systems modulo floating-point association, so the
  // trajectories agree to a small multiple of the CG tolerance.
  double worst_p = 0.0, worst_w = 0.0, worst_z = 0.0;
  for (std::size_t n = 0; n < direct.states.size(); ++n) {
    worst_p = std::max(worst_p, rel_field_diff(ctx.grid, translated.states[n].p,
                                               direct.states[n].p));
    worst_w = std::max(worst_w, rel_plate_diff(translated.states[n].w,
                                               direct.states[n].w));
    worst_z = std::max(worst_z, rel_field_diff(ctx.grid, translated.states[n].zeta,
                                               direct.states[n].zeta));
  }
  CHECK(worst_p < 1e-11);
  CHECK(worst_w < 1e-11);
  CHECK(worst_z < 1e-11);
  CHECK(translated.max_plate_residual < 1e-10);
}

TEST_CASE("translation data shapes and guards") {
  OperatorContext ctx = small_context(1.0, 1.0, 0.5, 0.5, 2, 2, 9);
  std::vector<PlateField> series;
  series.push_back(make_plate_field(ctx.basis, PlateRole::Load));
  CHECK_THROWS_AS(translate_source(ctx, series, 0.1), RegularityError);

  series.push_back(series.front());
  series.back().coef[0] = 1.0;
  TranslationResult tr = translate_source(ctx, series, 0.1);
  CHECK(tr.w_f.size() == 2);
  CHECK(tr.g_correction.size() == 2);
  for (double v : tr.g_correction[0].val) CHECK(v == 0.0);
  for (double v : tr.d0_correction.val) CHECK(v == 0.0);  // f(0) = 0 here
}

TEST_CASE("run guards: step count and horizon") {
  OperatorContext ctx = small_context(1.0, 1.0, 0.5, 0.5, 2, 2, 9);
  InitialData init;
  init.kind = InitialKind::FluidContent;
  init.field = random_pressure(ctx, 5u);
  CHECK_THROWS_AS(qs_run(ctx, init, SourceTerms{}, 1.0, 0.3, {}),
                  ValidationError);
  CHECK_THROWS_AS(qs_run(ctx, init, SourceTerms{}, -1.0, 0.1, {}),
                  ValidationError);
}

TEST_CASE("weak residual: machine-level plate rows, refinement-shrinking pressure rows") {
  const double h = 0.5;
  ManufacturedCase mc(h);

  auto residual_at = [&](double tau, int N3) {
    OperatorContext ctx = small_context(1.0, 1.0, 0.7, h, 2, 2, N3);
    SourceTerms sources = mc.sources(ctx.params, [](double) { return 1.0; });
    QSOptions opts;
    opts.cg.tol = 1e-12;
    QSRun run = qs_run(ctx, mc.initial(ctx), sources, 0.5, tau, opts);
    ResidualReport rep = weak_residual(ctx, run, sources);
    CHECK(rep.rows.size() == 27);  // 3 modes x 3 profiles x 3 windows
    CHECK(rep.max_plate_residual < 1e-12);
    return rep.max_pressure_residual;
  };

  double coarse = residual_at(1.0 / 10.0, 17);
  double fine = residual_at(1.0 / 40.0, 65);
  CHECK(coarse < 0.2);
  CHECK(fine < coarse / 2.0);
}

TEST_CASE("weak residual refuses unsupported inputs") {
  OperatorContext ctx = small_context(1.0, 1.0, 0.5, 0.5, 2, 2, 9);
  InitialData init;
  init.kind = InitialKind::FluidContent;
  init.field = random_pressure(ctx, 3u);
  QSRun run = qs_run(ctx, init, SourceTerms{}, 0.1, 0.05, {});

  QSRun truncated = run;
  truncated.states.resize(1);
  CHECK_THROWS_AS(weak_residual(ctx, truncated, SourceTerms{}), ValidationError);

  PermeabilityModel k3d;
  k3d.name = "general";
  k3d.structure = PermeabilityStructure::General;
  k3d.evaluate = [](double, double, double, double) { return 1.0; };
  k3d.k_lower = 0.5;
  k3d.k_upper = 1.5;
  OperatorContext ctx3d = small_context(1.0, 1.0, 0.5, 0.5, 2, 2, 9, k3d);
  QSRun run3d = qs_run(ctx3d, init, SourceTerms{}, 0.1, 0.05, {});
  CHECK_THROWS_AS(weak_residual(ctx3d, run3d, SourceTerms{}), ValidationError);
}

TEST_CASE("stability report: positive parts, ratio stable under time refinement") {
  const double h = 0.5;
  ManufacturedCase mc(h);
  OperatorContext ctx = small_context(1.0, 1.0, 0.7, h, 2, 2, 33);
  SourceTerms sources = mc.sources(ctx.params, [](double) { return 1.0; });

  QSOptions opts;
  opts.cg.tol = 1e-11;
  QSRun run_a = qs_run(ctx, mc.initial(ctx), sources, 0.5, 0.02, opts);
  QSRun run_b = qs_run(ctx, mc.initial(ctx), sources, 0.5, 0.005, opts);

  StabilityReport rep_a = stability_report(ctx, run_a, sources);
  StabilityReport rep_b = stability_report(ctx, run_b, sources);

  CHECK(rep_a.lhs > 0.0);
  CHECK(rep_a.g_part > 0.0);
  CHECK(rep_a.d0_part > 0.0);
  CHECK(rep_a.f_part == 0.0);  // manufactured case has zero plate load
  CHECK(rep_a.ratio > 0.0);
  // The discrete bound's ratio settles as tau shrinks.
  CHECK(std::abs(rep_a.ratio - rep_b.ratio) < 0.5 * rep_b.ratio);
}

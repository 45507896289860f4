#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/operators.hpp"
#include "core/rng.hpp"
#include "support/oracles.hpp"

using namespace poroplate;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

OperatorContext small_context(double c_p = 1.0, double D = 2.0,
                              double alpha = 0.8, double h = 0.5,
                              int M = 4, int N = 3, int N3 = 17) {
  PhysicalParams params = PhysicalParams::create(D, alpha, c_p, 0.0, h);
  return make_context(params, M, N, N3, permeability_constant(1.0));
}

PressureField random_field(const OperatorContext& ctx, Rng& rng) {
  PressureField p = make_pressure_field(ctx.basis, ctx.grid);
  for (double& v : p.val) v = rng.uniform(-1.0, 1.0);
  return p;
}

double rel_diff(const PressureField& a, const PressureField& b) {
  double num = 0.0, den = 1e-300;
  for (std::size_t i = 0; i < a.val.size(); ++i) {
    num = std::max(num, std::abs(a.val[i] - b.val[i]));
    den = std::max(den, std::abs(b.val[i]));
  }
  return num / den;
}
}  // namespace

TEST_CASE("B: rank-one form, symmetry, positivity, exact quadratic identity") {
  OperatorContext ctx = small_context();
  Rng rng(101);
  for (int rep = 0; rep < 30; ++rep) {
    PressureField p = random_field(ctx, rng);
    PressureField q = random_field(ctx, rng);
    PressureField Bp = apply_B(ctx, p);
    PressureField Bq = apply_B(ctx, q);

    double pq = pressure_dot(ctx.grid, Bp, q);
    double qp = pressure_dot(ctx.grid, p, Bq);
    CHECK(std::abs(pq - qp) <= 1e-13 * (std::abs(pq) + std::abs(qp) + 1.0));

    // (B p, p) = beta |K p|^2 exactly.
    std::vector<double> Kp = moment(ctx.grid, p);
    double kp2 = 0.0;
    for (double v : Kp) kp2 += v * v;
    double quad = pressure_dot(ctx.grid, Bp, p);
    CHECK(quad == doctest::Approx(ctx.params.beta * kp2).epsilon(1e-13));
    CHECK(quad >= -1e-13 * (1.0 + kp2));
  }
}

TEST_CASE("B equals its literal composition through the plate solve") {
  OperatorContext ctx = small_context(1.0, 3.7, 1.3, 0.6, 5, 4, 21);
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    PressureField p = random_field(ctx, rng);
    PressureField direct = apply_B(ctx, p);
    PressureField routed = apply_B_via_diagram(ctx, p);
    // Scale by beta * |p| so near-zero-moment fields do not inflate the
    // relative measure.
    double scale = ctx.params.beta * (pressure_l2(ctx.grid, p) + 1e-30);
    double num = 0.0;
    for (std::size_t i = 0; i < direct.val.size(); ++i)
      num = std::max(num, std::abs(direct.val[i] - routed.val[i]));
    CHECK(num / scale <= 1e-12);
  }
}

TEST_CASE("A: self-adjoint, positive semidefinite, kernel = constants") {
  OperatorContext ctx = small_context();
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    PressureField p = random_field(ctx, rng);
    PressureField q = random_field(ctx, rng);
    PressureField Ap = apply_A(ctx, p, 0.0);
    PressureField Aq = apply_A(ctx, q, 0.0);
    double pq = pressure_dot(ctx.grid, Ap, q);
    double qp = pressure_dot(ctx.grid, p, Aq);
    CHECK(std::abs(pq - qp) <= 1e-12 * (std::abs(pq) + std::abs(qp) + 1.0));
    CHECK(pressure_dot(ctx.grid, Ap, p) >= 0.0);

    // (A p, q)_h equals the energy form.
    CHECK(pq == doctest::Approx(diffusion_form(ctx, p, q, 0.0)).epsilon(1e-12));
  }

  // A annihilates fields constant in x3.
  PressureField c = make_pressure_field(ctx.basis, ctx.grid);
  Rng rng2(4);
  for (int plane = 0; plane < c.plane_count(); ++plane) {
    double v = rng2.uniform(-1.0, 1.0);
    for (int j = 0; j < c.N3; ++j) c.column(plane)[j] = v;
  }
  PressureField Ac = apply_A(ctx, c, 0.0);
  for (double v : Ac.val) CHECK(std::abs(v) <= 1e-13);
}

TEST_CASE("A coercivity against the declared lower bound") {
  PhysicalParams params = PhysicalParams::create(2.0, 1.0, 0.5, 0.0, 0.5);
  OperatorContext ctx = make_context(params, 3, 3, 13,
                                     permeability_layered_x3(0.4, 1.7));
  Rng rng(29);
  for (int rep = 0; rep < 20; ++rep) {
    PressureField p = random_field(ctx, rng);
    double energy = pressure_dot(ctx.grid, apply_A(ctx, p, 0.0), p);
    double d3 = pressure_d3_seminorm(ctx.grid, p);
    CHECK(energy >= 0.4 * d3 * d3 * (1.0 - 1e-13));
  }
}

TEST_CASE("A with a genuinely 3D coefficient stays self-adjoint and coercive") {
  PhysicalParams params = PhysicalParams::create(1.0, 1.0, 1.0, 0.0, 0.5);
  PermeabilityModel k;
  k.name = "test-general";
  k.evaluate = [](double x1, double x2, double x3, double t) {
    return 1.0 + 0.3 * std::sin(kPi * x1) * std::cos(kPi * x2) * x3 +
           0.1 * std::cos(t);
  };
  k.k_lower = 0.4;
  k.k_upper = 1.6;
  k.dt_envelope = [](double) { return 0.1; };
  k.structure = PermeabilityStructure::General;
  OperatorContext ctx = make_context(params, 4, 4, 11, k);

  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    PressureField p = random_field(ctx, rng);
    PressureField q = random_field(ctx, rng);
    PressureField Ap = apply_A(ctx, p, 0.3);
    PressureField Aq = apply_A(ctx, q, 0.3);
    double pq = pressure_dot(ctx.grid, Ap, q);
    double qp = pressure_dot(ctx.grid, p, Aq);
    CHECK(std::abs(pq - qp) <= 1e-12 * (std::abs(pq) + std::abs(qp) + 1.0));
    double d3 = pressure_d3_seminorm(ctx.grid, p);
    CHECK(pressure_dot(ctx.grid, Ap, p) >= 0.4 * d3 * d3 * (1.0 - 1e-12));
  }

  // The transverse-only fast path and the general path agree when the
  // coefficient really is transverse-only.
  PermeabilityModel kt = permeability_layered_x3(0.7, 1.2);
  OperatorContext ctx_fast = make_context(params, 4, 4, 11, kt);
  OperatorContext ctx_slow = ctx_fast;
  ctx_slow.permeability.structure = PermeabilityStructure::General;
  PressureField p = random_field(ctx_fast, rng);
  CHECK(rel_diff(apply_A(ctx_slow, p, 0.0), apply_A(ctx_fast, p, 0.0)) <= 1e-12);
}

TEST_CASE("assembly-time permeability guards") {
  PhysicalParams params = PhysicalParams::create(1.0, 1.0, 1.0, 0.0, 0.5);

  // A model that lies about its bounds trips the assembly-time check.
  PermeabilityModel liar = permeability_constant(1.0);
  liar.evaluate = [](double, double, double x3, double) {
    return 1.0 + x3;  // leaves [1,1] immediately
  };
  OperatorContext ctx = make_context(params, 2, 2, 9, liar);
  PressureField p = make_pressure_field(ctx.basis, ctx.grid);
  p.val[0] = 1.0;
  CHECK_THROWS_AS(apply_A(ctx, p, 0.0), BoundsViolation);

  PermeabilityModel nan_model = permeability_constant(1.0);
  nan_model.evaluate = [](double, double, double, double) {
    return std::nan("");
  };
  OperatorContext ctx2 = make_context(params, 2, 2, 9, nan_model);
  CHECK_THROWS_AS(apply_A(ctx2, p, 0.0), PermeabilityEvalError);
}

TEST_CASE("plate solve: frozen single-mode values and hinged trace identity") {
  // Unit modal load on (1,1), D = 1, no pressure: w = 1 / lambda_11^2
  // = 1 / (4 pi^4); frozen value 0.0025665097509840438.
  PhysicalParams params = PhysicalParams::create(1.0, 1.0, 1.0, 0.0, 0.5);
  OperatorContext ctx = make_context(params, 3, 3, 9, permeability_constant(1.0));
  PlateField f = make_plate_field(ctx.basis, PlateRole::Load);
  f.coef[ctx.basis.index(1, 1)] = 1.0;
  std::vector<double> zero_mom(ctx.basis.mode_count(), 0.0);
  PlateField w = solve_plate(ctx, zero_mom, f);
  CHECK(w.coef[ctx.basis.index(1, 1)] ==
        doctest::Approx(0.0025664955636710844).epsilon(1e-14));
  CHECK(w.coef[ctx.basis.index(1, 1)] ==
        doctest::Approx(1.0 / (4.0 * kPi * kPi * kPi * kPi)).epsilon(1e-14));

  // With pressure moment and load together, the modal identity
  // D lambda^2 w - alpha lambda (K p) - f = 0 holds to roundoff.
  Rng rng(41);
  OperatorContext ctx2 = small_context(0.7, 1.9, 1.1, 0.45, 4, 4, 13);
  PressureField p = random_field(ctx2, rng);
  PlateField load = make_plate_field(ctx2.basis, PlateRole::Load);
  for (double& v : load.coef) v = rng.uniform(-1.0, 1.0);
  std::vector<double> mom = moment(ctx2.grid, p);
  PlateField w2 = solve_plate(ctx2, mom, load);
  for (int q = 0; q < ctx2.basis.mode_count(); ++q) {
    double lam = ctx2.basis.lambdas()[q];
    double resid = ctx2.params.D * lam * lam * w2.coef[q] -
                   ctx2.params.alpha * lam * mom[q] - load.coef[q];
    CHECK(std::abs(resid) <= 1e-12 * (1.0 + std::abs(load.coef[q])));
  }
}

TEST_CASE("fluid content from (p, plate solve of p) collapses to (c_p I + B) p") {
  OperatorContext ctx = small_context(0.9, 2.4, 1.2, 0.55, 4, 3, 15);
  Rng rng(53);
  PressureField p = random_field(ctx, rng);
  PlateField f0 = make_plate_field(ctx.basis, PlateRole::Load);  // zero load
  PlateField w = solve_plate(ctx, moment(ctx.grid, p), f0);
  PressureField zeta = fluid_content_from_state(ctx, p, w);
  PressureField content = apply_fluid_content(ctx, p);
  CHECK(rel_diff(zeta, content) <= 1e-12);
}

TEST_CASE("content inversion: CG matches the rank-one closed form") {
  OperatorContext ctx = small_context(0.8, 1.5, 1.1, 0.5, 3, 3, 17);
  Rng rng(61);
  PressureField d = random_field(ctx, rng);

  CgResult cg;
  PressureField p = invert_fluid_content(ctx, d, {1e-13, 0}, &cg);
  CHECK(cg.relative_residual <= 1e-13);

  // Sherman-Morrison inverse of c_p I + beta x3 m^T per mode:
  //   p = d/c_p - beta x3 (m^T d) / (c_p (c_p + beta q_h)).
  const double c_p = ctx.params.c_p;
  const double beta = ctx.params.beta;
  double qh = 0.0;
  for (int j = 0; j < ctx.grid.N3(); ++j)
    qh += ctx.grid.weight(j) * ctx.grid.node(j) * ctx.grid.node(j);
  std::vector<double> md = moment(ctx.grid, d);
  PressureField ref = make_pressure_field(ctx.basis, ctx.grid);
  for (int plane = 0; plane < d.plane_count(); ++plane) {
    double gamma = beta * md[plane] / (c_p * (c_p + beta * qh));
    for (int j = 0; j < d.N3; ++j)
      ref.column(plane)[j] = d.column(plane)[j] / c_p - gamma * ctx.grid.node(j);
  }
  CHECK(rel_diff(p, ref) <= 1e-11);

  // Round trip: applying the content map recovers d.
  CHECK(rel_diff(apply_fluid_content(ctx, p), d) <= 1e-11);

  PhysicalParams incompressible = PhysicalParams::create(1.0, 1.0, 0.0, 0.0, 0.5);
  OperatorContext ctx0 =
      make_context(incompressible, 2, 2, 9, permeability_constant(1.0));
  CHECK_THROWS_AS(invert_fluid_content(ctx0, make_pressure_field(ctx0.basis, ctx0.grid)),
                  ValidationError);
}

TEST_CASE("weighted CG: convergence reporting and failure path") {
  OperatorContext ctx = small_context();
  Rng rng(71);
  PressureField b = random_field(ctx, rng);
  PressureField x = make_pressure_field(ctx.basis, ctx.grid);
  auto apply = [&ctx](const PressureField& in, PressureField& out) {
    out = apply_fluid_content(ctx, in);
  };
  CgResult r = weighted_cg(ctx.grid, apply, b, x, {1e-12, 0});
  CHECK(r.relative_residual <= 1e-12);
  CHECK(r.iterations >= 1);

  // Iteration cap of 1 on a non-trivial system cannot converge.
  PressureField x2 = make_pressure_field(ctx.basis, ctx.grid);
  CHECK_THROWS_AS(weighted_cg(ctx.grid, apply, b, x2, {1e-15, 1}), NoConvergence);
}

TEST_CASE("dense oracle: matrices match matrix-free kernels and dense LU solves") {
  OperatorContext ctx = small_context(1.3, 2.0, 0.9, 0.5, 2, 2, 9);
  DenseOracle oracle_mats = build_dense_oracle(ctx, 0.0);
  const int n = ctx.basis.mode_count() * ctx.grid.N3();

  // Weighted symmetry of dense A and B: W A and W B symmetric.
  Eigen::MatrixXd WA = oracle_mats.weights.asDiagonal() * oracle_mats.A;
  Eigen::MatrixXd WB = oracle_mats.weights.asDiagonal() * oracle_mats.B;
  CHECK((WA - WA.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((WB - WB.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

  // Dense application equals matrix-free application.
  Rng rng(83);
  PressureField p = random_field(ctx, rng);
  Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(p.val.data(), n);
  PressureField Ap = apply_A(ctx, p, 0.0);
  Eigen::VectorXd Ap_dense = oracle_mats.A * pv;
  for (int i = 0; i < n; ++i)
    CHECK(Ap_dense(i) == doctest::Approx(Ap.val[i]).epsilon(1e-11));

  // Dense LU inversion of the content map agrees with CG.
  PressureField d = random_field(ctx, rng);
  Eigen::VectorXd dv = Eigen::Map<const Eigen::VectorXd>(d.val.data(), n);
  Eigen::VectorXd pd = oracle_mats.content.partialPivLu().solve(dv);
  PressureField via_cg = invert_fluid_content(ctx, d, {1e-13, 0});
  for (int i = 0; i < n; ++i)
    CHECK(pd(i) == doctest::Approx(via_cg.val[i]).epsilon(1e-10));
}

TEST_CASE("context construction rejects inadmissible inputs") {
  PhysicalParams bad = PhysicalParams::create(1.0, 1.0, 1.0, 0.0, 0.5);
  bad.beta = 7.0;  // inconsistent with alpha^2 / D
  CHECK_THROWS_AS(make_context(bad, 2, 2, 9, permeability_constant(1.0)),
                  ValidationError);

  PhysicalParams neg = PhysicalParams::create(-1.0, 1.0, 1.0, 0.0, 0.5);
  CHECK_THROWS_AS(make_context(neg, 2, 2, 9, permeability_constant(1.0)),
                  ValidationError);

  PermeabilityModel empty_bounds = permeability_constant(1.0);
  empty_bounds.k_upper = 0.5;
  PhysicalParams ok = PhysicalParams::create(1.0, 1.0, 1.0, 0.0, 0.5);
  CHECK_THROWS_AS(make_context(ok, 2, 2, 9, empty_bounds), BoundsViolation);
}

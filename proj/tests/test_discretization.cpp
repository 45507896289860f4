#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/discretization.hpp"
#include "core/rng.hpp"
#include "support/oracles.hpp"

using namespace poroplate;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

PressureField random_modal_field(const SineBasis& basis,
                                 const TransverseGrid& grid, Rng& rng) {
  PressureField p = make_pressure_field(basis, grid);
  for (double& v : p.val) v = rng.uniform(-1.0, 1.0);
  return p;
}
}  // namespace

TEST_CASE("plate eigenvalues match the closed form and a dense FD eigensolve") {
  SineBasis basis = plan_basis(4, 4);

  // Frozen values: pi^2 (m^2 + n^2).
  CHECK(basis.lambda(1, 1) == doctest::Approx(19.739208802178716).epsilon(1e-15));
  CHECK(basis.lambda(2, 1) == doctest::Approx(49.34802200544679).epsilon(1e-15));
  CHECK(basis.lambda(2, 2) == doctest::Approx(78.95683520871487).epsilon(1e-15));

  // Independent confirmation: dense 5-point FD eigensolve, Richardson
  // extrapolated over two grids with step ratio exactly 2 (h = 1/13, 1/26).
  std::vector<double> coarse = oracle::fd_laplacian_eigenvalues(12, 3);
  std::vector<double> fine = oracle::fd_laplacian_eigenvalues(25, 3);
  double lam11 = oracle::richardson2(coarse[0], fine[0]);
  // modes (2,1) and (1,2) are degenerate; both sit at pi^2 * 5
  double lam21 = oracle::richardson2(coarse[1], fine[1]);
  // Leftover after extrapolation scales like m^6 h^4; 1e-4 covers mode (2,1).
  CHECK(lam11 == doctest::Approx(basis.lambda(1, 1)).epsilon(1e-4));
  CHECK(lam21 == doctest::Approx(basis.lambda(2, 1)).epsilon(1e-4));
}

TEST_CASE("sine transform round-trip and Parseval identity") {
  SineBasis basis = plan_basis(7, 5);
  Rng rng(42);

  std::vector<double> coef(basis.mode_count()), values(basis.mode_count()),
      back(basis.mode_count());
  for (double& c : coef) c = rng.uniform(-1.0, 1.0);

  basis.inverse(coef.data(), values.data());
  basis.forward(values.data(), back.data());
  for (int q = 0; q < basis.mode_count(); ++q)
    CHECK(back[q] == doctest::Approx(coef[q]).epsilon(1e-13));

  // Parseval: collocation quadrature of the squared field equals the modal
  // sum of squares.
  double modal = 0.0;
  for (double c : coef) modal += c * c;
  double colloc = 0.0;
  for (double v : values) colloc += v * v;
  colloc /= (basis.M() + 1) * (basis.N() + 1);
  CHECK(colloc == doctest::Approx(modal).epsilon(1e-12));
}

TEST_CASE("collocation sampling of a single mode is reproduced exactly") {
  SineBasis basis = plan_basis(5, 4);
  // Sample phi_23 at the collocation grid, transform forward: exactly one
  // nonzero coefficient.
  std::vector<double> values(basis.mode_count()), coef(basis.mode_count());
  for (int i = 1; i <= basis.M(); ++i)
    for (int l = 1; l <= basis.N(); ++l)
      values[(i - 1) * basis.N() + (l - 1)] =
          2.0 * std::sin(2.0 * kPi * basis.x1(i)) * std::sin(3.0 * kPi * basis.x2(l));
  basis.forward(values.data(), coef.data());
  for (int m = 1; m <= basis.M(); ++m)
    for (int n = 1; n <= basis.N(); ++n) {
      double expect = (m == 2 && n == 3) ? 1.0 : 0.0;
      CHECK(coef[basis.index(m, n)] == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("plan_basis rejects inadmissible sizes") {
  CHECK_THROWS_AS(plan_basis(0, 4), SizeError);
  CHECK_THROWS_AS(plan_basis(400, 400), SizeError);  // 160000 > limit
}

TEST_CASE("transverse grid: weights, symmetry, moment weights") {
  for (int N3 : {5, 9, 16, 33}) {
    TransverseGrid grid = build_transverse_grid(N3, 0.5);
    double wsum = 0.0, msum = 0.0;
    for (int j = 0; j < N3; ++j) {
      wsum += grid.weight(j);
      msum += grid.moment_weight(j);
      CHECK(grid.node(j) == -grid.node(N3 - 1 - j));  // exact mirror
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));  // 2h
    CHECK(std::abs(msum) <= 1e-14 * 0.25);               // h^2 scale
  }
  CHECK_THROWS_AS(build_transverse_grid(2, 0.5), SizeError);
  CHECK_THROWS_AS(build_transverse_grid(9, -1.0), ValidationError);
}

TEST_CASE("moment weights integrate x3*f to second order: frozen values") {
  const double h = 0.5;

  // Oracle quadrature, frozen against closed forms:
  //   int x3^2 dx3 = 2h^3/3 = 1/12;
  //   int x3 cos(pi (x3+h)/(2h)) dx3 = -8h^2/pi^2 = -2/pi^2.
  double q2 = oracle::integrate([](double x) { return x * x; }, -h, h);
  CHECK(q2 == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  double qc = oracle::integrate(
      [h](double x) { return x * std::cos(kPi * (x + h) / (2.0 * h)); }, -h, h);
  CHECK(qc == doctest::Approx(-2.0 / (kPi * kPi)).epsilon(1e-12));

  // Discrete moment converges at second order to the oracle values.
  auto discrete_moment = [h](int N3, const std::function<double(double)>& f) {
    TransverseGrid grid = build_transverse_grid(N3, h);
    double acc = 0.0;
    for (int j = 0; j < N3; ++j) acc += grid.moment_weight(j) * f(grid.node(j));
    return acc;
  };
  // x3 * x3 has a quadratic integrand: trapezoid error is exactly
  // -(b-a) dx^2 f''/12 here, giving a clean second-order sequence.
  double e_coarse = std::abs(discrete_moment(9, [](double x) { return x; }) - q2);
  double e_fine = std::abs(discrete_moment(17, [](double x) { return x; }) - q2);
  CHECK(e_fine < e_coarse);
  CHECK(e_coarse / e_fine == doctest::Approx(4.0).epsilon(0.05));

  double c_coarse = std::abs(discrete_moment(17, [h](double x) {
                      return std::cos(kPi * (x + h) / (2.0 * h));
                    }) - qc);
  double c_fine = std::abs(discrete_moment(33, [h](double x) {
                    return std::cos(kPi * (x + h) / (2.0 * h));
                  }) - qc);
  CHECK(c_coarse / c_fine == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("stiffness: symmetry, positive semidefiniteness, constant kernel") {
  TransverseGrid grid = build_transverse_grid(17, 0.5);
  Rng rng(7);
  std::vector<double> k(grid.N3() - 1);
  for (double& v : k) v = rng.uniform(0.5, 2.0);

  std::vector<double> p(grid.N3()), q(grid.N3());
  for (int rep = 0; rep < 10; ++rep) {
    for (double& v : p) v = rng.uniform(-1.0, 1.0);
    for (double& v : q) v = rng.uniform(-1.0, 1.0);
    double pq = grid.stiffness_form(k.data(), p.data(), q.data());
    double qp = grid.stiffness_form(k.data(), q.data(), p.data());
    CHECK(pq == doctest::Approx(qp).epsilon(1e-13));
    CHECK(grid.stiffness_form(k.data(), p.data(), p.data()) >= 0.0);
  }

  // Constants are in the kernel: S * 1 == 0 (no-flux closure).
  std::vector<double> ones(grid.N3(), 1.0), out(grid.N3());
  grid.apply_stiffness(k.data(), ones.data(), out.data());
  for (double v : out) CHECK(std::abs(v) <= 1e-14);
}

TEST_CASE("stiffness monotonicity in the coefficient") {
  TransverseGrid grid = build_transverse_grid(21, 0.75);
  Rng rng(11);
  const double kmin = 0.3;
  std::vector<double> k(grid.N3() - 1), ones(grid.N3() - 1, 1.0);
  for (double& v : k) v = rng.uniform(kmin, 3.0);
  std::vector<double> p(grid.N3());
  for (int rep = 0; rep < 20; ++rep) {
    for (double& v : p) v = rng.uniform(-2.0, 2.0);
    double full = grid.stiffness_form(k.data(), p.data(), p.data());
    double unit = grid.stiffness_form(ones.data(), p.data(), p.data());
    CHECK(full >= kmin * unit - 1e-13 * (1.0 + full));
  }
}

TEST_CASE("transverse Neumann spectrum matches the dense oracle") {
  // Smallest nonzero generalized eigenvalue of the (stiffness, mass) pencil
  // approaches (pi/2h)^2; frozen against the closed form for h = 0.5.
  const double h = 0.5;
  std::vector<double> coarse = oracle::transverse_neumann_eigenvalues(101, h, 2);
  std::vector<double> fine = oracle::transverse_neumann_eigenvalues(201, h, 2);
  CHECK(std::abs(coarse[0]) <= 1e-9);  // constant mode
  double mu1 = oracle::richardson2(coarse[1], fine[1]);
  CHECK(mu1 == doctest::Approx(kPi * kPi).epsilon(1e-6));
}

TEST_CASE("moment / lift_moment adjoint identity is exact") {
  SineBasis basis = plan_basis(4, 3);
  TransverseGrid grid = build_transverse_grid(15, 0.5);
  Rng rng(3);

  for (int rep = 0; rep < 25; ++rep) {
    PressureField p = random_modal_field(basis, grid, rng);
    std::vector<double> q(basis.mode_count());
    for (double& v : q) v = rng.uniform(-1.0, 1.0);

    // (K p, q)_omega = sum_modes (K p) q ; (p, x3 q)_Omega via weighted dot.
    std::vector<double> Kp = moment(grid, p);
    double lhs = 0.0;
    for (int i = 0; i < basis.mode_count(); ++i) lhs += Kp[i] * q[i];
    PressureField lift = lift_moment(basis, grid, q);
    double rhs = pressure_dot(grid, p, lift);
    double scale = std::abs(lhs) + std::abs(rhs) + 1e-30;
    CHECK(std::abs(lhs - rhs) / scale <= 1e-13);
  }
}

TEST_CASE("moment norm bound: |K p| <= sqrt(2h^3/3 + h dx^2/3) |p|") {
  // The discrete moment operator norm is sqrt(sum w_j x3_j^2); the test
  // verifies the Cauchy-Schwarz bound is attained by p = x3 and respected
  // by random fields.
  SineBasis basis = plan_basis(3, 3);
  const double h = 0.7;
  TransverseGrid grid = build_transverse_grid(19, h);
  double qh = 0.0;
  for (int j = 0; j < grid.N3(); ++j)
    qh += grid.weight(j) * grid.node(j) * grid.node(j);
  // Discrete norm exceeds the continuum value 2h^3/3 by exactly h dx^2 / 3.
  double continuum = 2.0 * h * h * h / 3.0;
  CHECK(qh == doctest::Approx(continuum + h * grid.dx() * grid.dx() / 3.0)
                  .epsilon(1e-12));

  Rng rng(19);
  for (int rep = 0; rep < 20; ++rep) {
    PressureField p = random_modal_field(basis, grid, rng);
    std::vector<double> Kp = moment(grid, p);
    double kpn = 0.0;
    for (double v : Kp) kpn += v * v;
    double pn = pressure_dot(grid, p, p);
    CHECK(kpn <= qh * pn * (1.0 + 1e-13));
  }
}

TEST_CASE("pressure layout conversions are exact inverses") {
  SineBasis basis = plan_basis(5, 6);
  TransverseGrid grid = build_transverse_grid(9, 0.4);
  Rng rng(23);
  PressureField p = random_modal_field(basis, grid, rng);
  PressureField back = to_modal(basis, to_collocation(basis, p));
  for (std::size_t i = 0; i < p.val.size(); ++i)
    CHECK(back.val[i] == doctest::Approx(p.val[i]).epsilon(1e-13));
}

TEST_CASE("norms agree with oracle quadrature on a smooth field") {
  // p(x) = cos(pi (x3+h)/(2h)) * phi_11: L2 norm is |P|_{L2(-h,h)} since
  // phi_11 is orthonormal; compare against adaptive quadrature.
  SineBasis basis = plan_basis(3, 3);
  const double h = 0.5;
  TransverseGrid grid = build_transverse_grid(129, h);
  PressureField p = make_pressure_field(basis, grid);
  for (int j = 0; j < grid.N3(); ++j)
    p.column(basis.index(1, 1))[j] =
        std::cos(kPi * (grid.node(j) + h) / (2.0 * h));

  double ref = std::sqrt(oracle::integrate(
      [h](double x) {
        double c = std::cos(kPi * (x + h) / (2.0 * h));
        return c * c;
      },
      -h, h));
  CHECK(pressure_l2(grid, p) == doctest::Approx(ref).epsilon(1e-4));

  double dref = std::sqrt(oracle::integrate(
      [h](double x) {
        double s = -kPi / (2.0 * h) * std::sin(kPi * (x + h) / (2.0 * h));
        return s * s;
      },
      -h, h));
  CHECK(pressure_d3_seminorm(grid, p) == doctest::Approx(dref).epsilon(1e-4));
}

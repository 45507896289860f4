#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/model.hpp"

using namespace poroplate;

TEST_CASE("parameter validation: admissible set and beta consistency") {
  PhysicalParams good = PhysicalParams::create(2.0, 1.5, 0.8, 0.0, 0.5);
  CHECK(good.beta == doctest::Approx(1.5 * 1.5 / 2.0).epsilon(1e-15));
  CHECK(validate_params(good).all_pass());

  PhysicalParams zero_cp = PhysicalParams::create(1.0, 1.0, 0.0, 0.0, 0.5);
  CHECK(validate_params(zero_cp).all_pass());  // admissible; QS rejects later

  PhysicalParams bad_beta = good;
  bad_beta.beta = 3.0;
  ValidationReport r = validate_params(bad_beta);
  CHECK_FALSE(r.all_pass());
  bool found = false;
  for (const auto& it : r.items)
    if (it.name == "beta_consistent" && !it.pass) found = true;
  CHECK(found);

  PhysicalParams neg_h = PhysicalParams::create(1.0, 1.0, 1.0, 0.0, -0.5);
  CHECK_FALSE(validate_params(neg_h).all_pass());

  PhysicalParams nan_d = good;
  nan_d.D = std::nan("");
  CHECK_FALSE(validate_params(nan_d).all_pass());
}

TEST_CASE("permeability presets: bounds, structure, envelope declarations") {
  PermeabilityModel c = permeability_constant(2.5);
  CHECK(c.k_lower == 2.5);
  CHECK(c.k_upper == 2.5);
  CHECK(c.evaluate(0.3, 0.7, -0.2, 9.0) == 2.5);
  CHECK_FALSE(static_cast<bool>(c.dt_envelope));

  PermeabilityModel s = permeability_sin_in_time(1.0, 0.5, 2.0, 10.0);
  CHECK(s.k_lower == doctest::Approx(0.5));
  CHECK(s.k_upper == doctest::Approx(1.5));
  CHECK(s.dt_envelope(3.0) == doctest::Approx(1.0));
  CHECK(s.dt_envelope_integral == doctest::Approx(10.0));
  CHECK(s.evaluate(0, 0, 0, 0.25 * 3.141592653589793) ==
        doctest::Approx(1.0 + 0.5 * std::sin(0.5 * 3.141592653589793)));

  PermeabilityModel l = permeability_layered_x3(0.3, 1.2);
  CHECK(l.k_lower == doctest::Approx(0.3));
  CHECK(l.k_upper == doctest::Approx(1.2));
  CHECK(l.evaluate(0, 0, -0.1, 0) == doctest::Approx(0.3));
  CHECK(l.evaluate(0, 0, 0.1, 0) == doctest::Approx(1.2));

  CHECK_THROWS_AS(permeability_constant(0.0), BoundsViolation);
  CHECK_THROWS_AS(permeability_sin_in_time(0.5, 0.5, 1.0, 1.0), BoundsViolation);
}

TEST_CASE("validate_permeability: clean models pass and report observed range") {
  GridSpec spec{3, 3, 9};
  ValidationReport r =
      validate_permeability(permeability_sin_in_time(1.0, 0.5, 1.0, 6.3),
                            spec, 0.5, 6.3);
  CHECK(r.all_pass());
  CHECK(r.observed_min >= 0.5);
  CHECK(r.observed_max <= 1.5);
  CHECK(r.observed_max > 1.4);  // the sweep reaches near the peak
}

TEST_CASE("validate_permeability: violations throw typed errors") {
  GridSpec spec{2, 2, 7};

  // k(t) = t leaves [0.1, 0.5] on [0, 1].
  PermeabilityModel drift;
  drift.name = "drift";
  drift.evaluate = [](double, double, double, double t) { return t; };
  drift.k_lower = 0.1;
  drift.k_upper = 0.5;
  drift.dt_envelope = [](double) { return 1.0; };
  CHECK_THROWS_AS(validate_permeability(drift, spec, 0.5, 1.0), BoundsViolation);

  // Correct bounds but an envelope that under-declares the slope.
  PermeabilityModel fast;
  fast.name = "fast";
  fast.evaluate = [](double, double, double, double t) {
    return 1.0 + 0.5 * std::sin(10.0 * t);
  };
  fast.k_lower = 0.5;
  fast.k_upper = 1.5;
  fast.dt_envelope = [](double) { return 0.1; };  // true slope reaches 5
  CHECK_THROWS_AS(validate_permeability(fast, spec, 0.5, 1.0),
                  EnvelopeViolation);

  PermeabilityModel nan_k;
  nan_k.name = "nan";
  nan_k.evaluate = [](double, double, double x3, double) {
    return x3 > 0.0 ? std::nan("") : 1.0;
  };
  nan_k.k_lower = 0.5;
  nan_k.k_upper = 1.5;
  CHECK_THROWS_AS(validate_permeability(nan_k, spec, 0.5, 1.0),
                  PermeabilityEvalError);

  PermeabilityModel inverted = permeability_constant(1.0);
  inverted.k_lower = 2.0;  // empty interval
  CHECK_THROWS_AS(validate_permeability(inverted, spec, 0.5, 1.0),
                  BoundsViolation);
}

TEST_CASE("sources: evaluation defaults and finiteness validation") {
  SineBasis basis = plan_basis(3, 3);
  TransverseGrid grid = build_transverse_grid(9, 0.5);

  SourceTerms zero;
  PlateField f = eval_plate_load(zero, basis, 1.0);
  for (double v : f.coef) CHECK(v == 0.0);
  PressureField g = eval_fluid_source(zero, basis, grid, 1.0);
  for (double v : g.val) CHECK(v == 0.0);
  CHECK_NOTHROW(validate_sources(zero, basis, grid, 2.0));

  SourceTerms bad;
  bad.plate_load = [](const SineBasis& b, double t, PlateField& out) {
    out.coef[0] = t > 0.5 ? std::nan("") : 1.0;
    (void)b;
  };
  CHECK_THROWS_AS(validate_sources(bad, basis, grid, 2.0), ValidationError);
}

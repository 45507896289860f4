#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace poroplate {

PhysicalParams PhysicalParams::create(double D, double alpha, double c_p,
                                      double rho_p, double h) {
  PhysicalParams p;
  p.D = D;
  p.alpha = alpha;
  p.c_p = c_p;
  p.rho_p = rho_p;
  p.h = h;
  p.beta = alpha * alpha / D;
  return p;
}

bool ValidationReport::all_pass() const {
  for (const ValidationIssue& it : items)
    if (!it.pass) return false;
  return true;
}

void ValidationReport::add(const std::string& name, bool pass,
                           const std::string& message) {
  items.push_back({name, pass, message});
}

ValidationReport validate_params(const PhysicalParams& p) {
  ValidationReport r;
  auto finite = [](double v) { return std::isfinite(v); };
  r.add("finite", finite(p.D) && finite(p.alpha) && finite(p.c_p) &&
                      finite(p.rho_p) && finite(p.h) && finite(p.beta),
        "all constants finite");
  r.add("rigidity_positive", p.D > 0.0, "D > 0");
  r.add("coupling_positive", p.alpha > 0.0, "alpha > 0");
  r.add("thickness_positive", p.h > 0.0, "h > 0");
  r.add("compressibility_nonnegative", p.c_p >= 0.0, "c_p >= 0");
  r.add("density_nonnegative", p.rho_p >= 0.0, "rho_p >= 0");
  if (p.D > 0.0) {
    double expected = p.alpha * p.alpha / p.D;
    double scale = std::max(std::abs(expected), std::abs(p.beta));
    bool ok = scale == 0.0 ? p.beta == 0.0
                           : std::abs(p.beta - expected) <= 1e-15 * scale;
    r.add("beta_consistent", ok,
          "stored beta matches alpha^2 / D to relative 1e-15");
  } else {
    r.add("beta_consistent", false, "beta underivable: D <= 0");
  }
  return r;
}

namespace {

std::string point_string(double x1, double x2, double x3, double t) {
  std::ostringstream os;
  os << "(x1=" << x1 << ", x2=" << x2 << ", x3=" << x3 << ", t=" << t << ")";
  return os.str();
}

}  // namespace

ValidationReport validate_permeability(const PermeabilityModel& k,
                                       const GridSpec& spec, double h,
                                       double T, int time_samples) {
  if (!k.evaluate)
    throw PermeabilityEvalError("validate_permeability: model '" + k.name +
                                "' has no evaluate callback");
  if (!(k.k_lower > 0.0) || k.k_upper < k.k_lower)
    throw BoundsViolation("validate_permeability: model '" + k.name +
                          "' declares inadmissible bounds [" +
                          std::to_string(k.k_lower) + ", " +
                          std::to_string(k.k_upper) + "]");

  SineBasis basis = plan_basis(spec.M, spec.N);
  TransverseGrid grid = build_transverse_grid(spec.N3, h);

  // x3 sample set: nodes plus interval midpoints (the stiffness quadrature
  // points actually used downstream).
  std::vector<double> x3s;
  x3s.reserve(2 * spec.N3);
  for (int j = 0; j < spec.N3; ++j) x3s.push_back(grid.node(j));
  for (int j = 0; j + 1 < spec.N3; ++j) x3s.push_back(grid.midpoint(j));

  const bool time_dependent = static_cast<bool>(k.dt_envelope);
  const int nt = time_dependent ? std::max(2, time_samples) : 1;

  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -vmin;

  auto sample = [&](double x1, double x2, double x3, double t) {
    double v = k.evaluate(x1, x2, x3, t);
    if (!std::isfinite(v))
      throw PermeabilityEvalError("permeability '" + k.name +
                                  "' non-finite at " +
                                  point_string(x1, x2, x3, t));
    if (v < k.k_lower || v > k.k_upper)
      throw BoundsViolation("permeability '" + k.name + "' = " +
                            std::to_string(v) + " outside declared [" +
                            std::to_string(k.k_lower) + ", " +
                            std::to_string(k.k_upper) + "] at " +
                            point_string(x1, x2, x3, t));
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
    return v;
  };

  for (int it = 0; it < nt; ++it) {
    double t = nt == 1 ? 0.0 : T * it / (nt - 1);
    for (int i = 1; i <= spec.M; ++i) {
      for (int l = 1; l <= spec.N; ++l) {
        double x1 = basis.x1(i);
        double x2 = basis.x2(l);
        for (double x3 : x3s) {
          sample(x1, x2, x3, t);
          if (time_dependent) {
            // Centered difference quotient in time against the declared
            // envelope, with a tiny absolute slack for roundoff.
            double dt = std::max(1e-8, T * 1e-6);
            double lo = std::max(0.0, t - dt);
            double hi = std::min(T, t + dt);
            if (hi > lo) {
              double dq = (k.evaluate(x1, x2, x3, hi) -
                           k.evaluate(x1, x2, x3, lo)) /
                          (hi - lo);
              double env = k.dt_envelope(t);
              if (std::abs(dq) > env + 1e-9 * (1.0 + std::abs(env)))
                throw EnvelopeViolation(
                    "permeability '" + k.name + "' time slope " +
                    std::to_string(dq) + " exceeds declared envelope " +
                    std::to_string(env) + " at " + point_string(x1, x2, x3, t));
            }
          }
        }
      }
    }
  }

  ValidationReport r;
  r.observed_min = vmin;
  r.observed_max = vmax;
  r.add("bounds", true,
        "sampled range [" + std::to_string(vmin) + ", " + std::to_string(vmax) +
            "] inside declared [" + std::to_string(k.k_lower) + ", " +
            std::to_string(k.k_upper) + "]");
  if (time_dependent)
    r.add("envelope", true, "time slopes within declared envelope");
  return r;
}

PermeabilityModel permeability_constant(double k0) {
  if (!(k0 > 0.0))
    throw BoundsViolation("permeability_constant: k0 must be positive");
  PermeabilityModel m;
  m.name = "constant";
  m.evaluate = [k0](double, double, double, double) { return k0; };
  m.k_lower = k0;
  m.k_upper = k0;
  m.structure = PermeabilityStructure::Constant;
  return m;
}

PermeabilityModel permeability_sin_in_time(double base, double amp,
                                           double omega, double T) {
  if (!(base > std::abs(amp)))
    throw BoundsViolation(
        "permeability_sin_in_time: need base > |amp| for positivity");
  PermeabilityModel m;
  m.name = "sin-in-time";
  m.evaluate = [base, amp, omega](double, double, double, double t) {
    return base + amp * std::sin(omega * t);
  };
  m.k_lower = base - std::abs(amp);
  m.k_upper = base + std::abs(amp);
  m.dt_envelope = [amp, omega](double) { return std::abs(amp * omega); };
  m.dt_envelope_integral = std::abs(amp * omega) * T;
  m.structure = PermeabilityStructure::TransverseOnly;
  return m;
}

PermeabilityModel permeability_layered_x3(double k_bottom, double k_top) {
  if (!(k_bottom > 0.0) || !(k_top > 0.0))
    throw BoundsViolation("permeability_layered_x3: layer values must be positive");
  PermeabilityModel m;
  m.name = "layered-x3";
  m.evaluate = [k_bottom, k_top](double, double, double x3, double) {
    if (x3 < 0.0) return k_bottom;
    if (x3 > 0.0) return k_top;
    return 0.5 * (k_bottom + k_top);
  };
  m.k_lower = std::min(k_bottom, k_top);
  m.k_upper = std::max(k_bottom, k_top);
  m.structure = PermeabilityStructure::TransverseOnly;
  return m;
}

PlateField eval_plate_load(const SourceTerms& s, const SineBasis& basis,
                           double t) {
  PlateField f = make_plate_field(basis, PlateRole::Load);
  if (s.plate_load) s.plate_load(basis, t, f);
  return f;
}

PressureField eval_fluid_source(const SourceTerms& s, const SineBasis& basis,
                                const TransverseGrid& grid, double t) {
  PressureField g = make_pressure_field(basis, grid);
  if (s.fluid_source) s.fluid_source(basis, grid, t, g);
  return g;
}

void validate_sources(const SourceTerms& s, const SineBasis& basis,
                      const TransverseGrid& grid, double T) {
  for (int it = 0; it <= 4; ++it) {
    double t = T * it / 4.0;
    PlateField f = eval_plate_load(s, basis, t);
    for (double v : f.coef)
      if (!std::isfinite(v))
        throw ValidationError("plate load non-finite at t=" + std::to_string(t));
    PressureField g = eval_fluid_source(s, basis, grid, t);
    for (double v : g.val)
      if (!std::isfinite(v))
        throw ValidationError("fluid source non-finite at t=" + std::to_string(t));
  }
}

}  // namespace poroplate

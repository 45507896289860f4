#include "core/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "core/rng.hpp"
#include "core/verify.hpp"

namespace poroplate {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const KeyValue& kv) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(kv.value.c_str(), &end);
  if (end == kv.value.c_str() || *end != '\0' || errno == ERANGE ||
      !std::isfinite(v))
    throw SchemaError("key '" + kv.key + "': expected a finite number, got '" +
                          kv.value + "'",
                      kv.key);
  return v;
}

long long parse_int(const KeyValue& kv) {
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(kv.value.c_str(), &end, 10);
  if (end == kv.value.c_str() || *end != '\0' || errno == ERANGE)
    throw SchemaError("key '" + kv.key + "': expected an integer, got '" +
                          kv.value + "'",
                      kv.key);
  return v;
}

unsigned long long parse_uint(const KeyValue& kv) {
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(kv.value.c_str(), &end, 10);
  if (end == kv.value.c_str() || *end != '\0' || errno == ERANGE ||
      kv.value.find('-') != std::string::npos)
    throw SchemaError("key '" + kv.key +
                          "': expected a nonnegative integer, got '" +
                          kv.value + "'",
                      kv.key);
  return v;
}

void expect_one_of(const KeyValue& kv,
                   std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (kv.value == a) return;
  std::string msg = "key '" + kv.key + "': '" + kv.value + "' is not one of {";
  bool first = true;
  for (const char* a : allowed) {
    if (!first) msg += ", ";
    msg += a;
    first = false;
  }
  msg += "}";
  throw SchemaError(msg, kv.key);
}

void require(bool ok, const std::string& message, const std::string& key) {
  if (!ok) throw SchemaError(message, key);
}

}  // namespace

std::vector<KeyValue> parse_key_values(const std::string& text) {
  std::vector<KeyValue> pairs;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) +
                           ": expected 'key = value', got '" + line + "'",
                       line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ParseError("line " + std::to_string(line_no) +
                           ": missing key before '='",
                       line_no);
    if (value.empty())
      throw ParseError("line " + std::to_string(line_no) +
                           ": missing value for key '" + key + "'",
                       line_no);
    pairs.push_back({key, value, line_no});
  }
  return pairs;
}

bool is_known_key(const std::string& key) {
  static const char* kKeys[] = {
      "mode",          "D",
      "alpha",         "c_p",
      "rho_p",         "h",
      "M",             "N",
      "N3",            "T",
      "tau",           "k.preset",
      "k.base",        "k.amp",
      "k.omega",       "k.bottom",
      "k.top",         "source.preset",
      "initial.preset", "initial.kind",
      "inertial.scheme", "inertial.d0_convention",
      "cg.tol",        "seed",
      "snapshot.every"};
  for (const char* k : kKeys)
    if (key == k) return true;
  return false;
}

RunConfig make_run_config(const std::vector<KeyValue>& pairs) {
  RunConfig c;
  for (const KeyValue& kv : pairs) {
    if (kv.key == "mode") {
      expect_one_of(kv, {"quasistatic", "inertial", "verify", "convergence"});
      c.mode = kv.value == "quasistatic"   ? RunMode::Quasistatic
               : kv.value == "inertial"    ? RunMode::Inertial
               : kv.value == "verify"      ? RunMode::Verify
                                           : RunMode::Convergence;
    } else if (kv.key == "D") {
      c.D = parse_double(kv);
    } else if (kv.key == "alpha") {
      c.alpha = parse_double(kv);
    } else if (kv.key == "c_p") {
      c.c_p = parse_double(kv);
    } else if (kv.key == "rho_p") {
      c.rho_p = parse_double(kv);
    } else if (kv.key == "h") {
      c.h = parse_double(kv);
    } else if (kv.key == "M") {
      c.M = static_cast<int>(parse_int(kv));
    } else if (kv.key == "N") {
      c.N = static_cast<int>(parse_int(kv));
    } else if (kv.key == "N3") {
      c.N3 = static_cast<int>(parse_int(kv));
    } else if (kv.key == "T") {
      c.T = parse_double(kv);
    } else if (kv.key == "tau") {
      c.tau = parse_double(kv);
    } else if (kv.key == "k.preset") {
      expect_one_of(kv, {"constant", "sin-in-time", "layered-x3"});
      c.k_preset = kv.value;
    } else if (kv.key == "k.base") {
      c.k_base = parse_double(kv);
    } else if (kv.key == "k.amp") {
      c.k_amp = parse_double(kv);
    } else if (kv.key == "k.omega") {
      c.k_omega = parse_double(kv);
    } else if (kv.key == "k.bottom") {
      c.k_bottom = parse_double(kv);
    } else if (kv.key == "k.top") {
      c.k_top = parse_double(kv);
    } else if (kv.key == "source.preset") {
      expect_one_of(kv, {"zero", "manufactured"});
      c.source_preset = kv.value;
    } else if (kv.key == "initial.preset") {
      expect_one_of(kv, {"zero", "profile", "random", "manufactured"});
      c.initial_preset = kv.value;
    } else if (kv.key == "initial.kind") {
      expect_one_of(kv, {"content", "pressure"});
      c.initial_kind = kv.value;
    } else if (kv.key == "inertial.scheme") {
      expect_one_of(kv, {"backward-euler", "crank-nicolson"});
      c.scheme = kv.value;
    } else if (kv.key == "inertial.d0_convention") {
      expect_one_of(kv, {"velocity", "displacement"});
      c.d0_convention = kv.value;
    } else if (kv.key == "cg.tol") {
      c.cg_tol = parse_double(kv);
    } else if (kv.key == "seed") {
      c.seed = parse_uint(kv);
    } else if (kv.key == "snapshot.every") {
      c.snapshot_every = static_cast<int>(parse_int(kv));
    } else {
      throw SchemaError("unknown key '" + kv.key + "'", kv.key);
    }
  }

  require(c.c_p > 0.0, "incompressible case unsupported: c_p must be positive",
          "c_p");
  require(c.D > 0.0, "D must be positive", "D");
  require(c.h > 0.0, "h must be positive", "h");
  require(c.mode != RunMode::Inertial || c.rho_p > 0.0,
          "rho_p must be positive for the inertial mode", "rho_p");
  require(c.M >= 1, "M must be at least 1", "M");
  require(c.N >= 1, "N must be at least 1", "N");
  require(c.N3 >= 3, "N3 must be at least 3", "N3");
  require(c.T > 0.0, "T must be positive", "T");
  require(c.tau > 0.0, "tau must be positive", "tau");
  require(c.tau <= c.T, "tau must not exceed T", "tau");
  require(c.cg_tol > 0.0 && c.cg_tol < 1.0, "cg.tol must lie in (0, 1)",
          "cg.tol");
  require(c.snapshot_every >= 0, "snapshot.every must be nonnegative",
          "snapshot.every");
  if (c.source_preset == "manufactured") {
    require(c.k_preset != "layered-x3",
            "source.preset=manufactured requires a transverse-constant "
            "permeability (k.preset constant or sin-in-time)",
            "source.preset");
    if (c.mode == RunMode::Inertial)
      require(c.k_preset == "constant" && c.k_base == 1.0,
              "inertial manufactured sources require k.preset=constant with "
              "k.base=1",
              "source.preset");
  }
  return c;
}

RunConfig parse_config(const std::string& text) {
  return make_run_config(parse_key_values(text));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream out;
  const char* mode = c.mode == RunMode::Quasistatic   ? "quasistatic"
                     : c.mode == RunMode::Inertial    ? "inertial"
                     : c.mode == RunMode::Verify      ? "verify"
                                                      : "convergence";
  out << "mode = " << mode << "\n";
  out << "D = " << format_double(c.D) << "\n";
  out << "alpha = " << format_double(c.alpha) << "\n";
  out << "c_p = " << format_double(c.c_p) << "\n";
  out << "rho_p = " << format_double(c.rho_p) << "\n";
  out << "h = " << format_double(c.h) << "\n";
  out << "M = " << c.M << "\n";
  out << "N = " << c.N << "\n";
  out << "N3 = " << c.N3 << "\n";
  out << "T = " << format_double(c.T) << "\n";
  out << "tau = " << format_double(c.tau) << "\n";
  out << "k.preset = " << c.k_preset << "\n";
  out << "k.base = " << format_double(c.k_base) << "\n";
  out << "k.amp = " << format_double(c.k_amp) << "\n";
  out << "k.omega = " << format_double(c.k_omega) << "\n";
  out << "k.bottom = " << format_double(c.k_bottom) << "\n";
  out << "k.top = " << format_double(c.k_top) << "\n";
  out << "source.preset = " << c.source_preset << "\n";
  out << "initial.preset = " << c.initial_preset << "\n";
  out << "initial.kind = " << c.initial_kind << "\n";
  out << "inertial.scheme = " << c.scheme << "\n";
  out << "inertial.d0_convention = " << c.d0_convention << "\n";
  out << "cg.tol = " << format_double(c.cg_tol) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "snapshot.every = " << c.snapshot_every << "\n";
  return out.str();
}

PermeabilityModel configured_permeability(const RunConfig& c) {
  if (c.k_preset == "constant") return permeability_constant(c.k_base);
  if (c.k_preset == "sin-in-time")
    return permeability_sin_in_time(c.k_base, c.k_amp, c.k_omega, c.T);
  return permeability_layered_x3(c.k_bottom, c.k_top);
}

OperatorContext make_configured_context(const RunConfig& c) {
  PhysicalParams params =
      PhysicalParams::create(c.D, c.alpha, c.c_p, c.rho_p, c.h);
  return make_context(params, c.M, c.N, c.N3, configured_permeability(c));
}

SourceTerms configured_sources(const RunConfig& c, const OperatorContext& ctx) {
  if (c.source_preset == "zero") return SourceTerms{};
  if (c.mode == RunMode::Inertial)
    return manufactured_inertial_case(c.h).sources(ctx.params);
  return manufactured_qs_case(c.h, 1.0, c.k_base,
                              c.k_preset == "sin-in-time" ? c.k_amp : 0.0,
                              c.k_omega)
      .sources(ctx.params);
}

InitialData configured_initial(const RunConfig& c, const OperatorContext& ctx) {
  InitialData init;
  init.kind = c.initial_kind == "pressure" ? InitialKind::Pressure
                                           : InitialKind::FluidContent;
  init.field = make_pressure_field(ctx.basis, ctx.grid);
  const bool inertial = c.mode == RunMode::Inertial;
  if (inertial) {
    init.w0 = make_plate_field(ctx.basis, PlateRole::Displacement);
    init.w1 = make_plate_field(ctx.basis, PlateRole::Velocity);
  }

  if (c.initial_preset == "zero") return init;

  if (c.initial_preset == "random") {
    Rng rng(c.seed);
    for (double& v : init.field.val) v = rng.uniform(-1.0, 1.0);
    if (inertial) {
      for (double& v : init.w0.coef) v = rng.uniform(-1.0, 1.0);
      for (double& v : init.w1.coef) v = rng.uniform(-1.0, 1.0);
    }
    return init;
  }

  if (c.initial_preset == "manufactured") {
    // The closed-form cases carry their canonical kind (content for the
    // quasi-static decay, pressure plus plate data for the inertial one).
    if (inertial) return manufactured_inertial_case(c.h).initial(ctx);
    return manufactured_qs_case(c.h).initial(ctx);
  }

  // "profile": cosine transverse profile on the lowest mode, vanishing
  // flux at both faces; as content it includes the matching odd part.
  double* col = init.field.column(ctx.basis.index(1, 1));
  const double kappa = -8.0 * c.h * c.h / (kPi * kPi);
  for (int j = 0; j < ctx.grid.N3(); ++j) {
    double x3 = ctx.grid.node(j);
    double P = std::cos(kPi * (x3 + c.h) / (2.0 * c.h));
    col[j] = init.kind == InitialKind::Pressure
                 ? P
                 : ctx.params.c_p * P + ctx.params.beta * kappa * x3;
  }
  return init;
}

}  // namespace poroplate

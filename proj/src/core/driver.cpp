#include "core/driver.hpp"

#include <cstdio>
#include <sstream>

#include "core/output.hpp"
#include "core/verify.hpp"

namespace poroplate {

namespace {

std::string snapshot_name(const char* stem, int step) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06d.bin", stem, step);
  return std::string(buf);
}

void drive_quasistatic(const RunConfig& cfg, OutputDir& out,
                     std::ostringstream& info) {
  OperatorContext ctx = make_configured_context(cfg);
  SourceTerms sources = configured_sources(cfg, ctx);
  InitialData init = configured_initial(cfg, ctx);
  QSOptions opts;
  opts.cg.tol = cfg.cg_tol;
  QSRun run = qs_run(ctx, init, sources, cfg.T, cfg.tau, opts);

  out.write_text("timeseries.csv", qs_timeseries_csv(ctx, run),
                 "rows=" + std::to_string(run.states.size()) + " cols=7");
  if (cfg.snapshot_every > 0) {
    for (std::size_t n = 0; n < run.states.size();
         n += static_cast<std::size_t>(cfg.snapshot_every)) {
      out.write_pressure_snapshot(snapshot_name("pressure", static_cast<int>(n)),
                                  ctx.basis, ctx.grid, run.states[n].p);
      out.write_plate_snapshot(snapshot_name("plate", static_cast<int>(n)),
                               ctx.basis, run.states[n].w);
    }
  }
  const QSState& last = run.states.back();
  out.write_pressure_snapshot("pressure_final.bin", ctx.basis, ctx.grid,
                              last.p);
  out.write_plate_snapshot("plate_final.bin", ctx.basis, last.w);
  if (cfg.N3 % 2 == 1)
    out.write_text("midplane_pressure.csv", midplane_pressure_csv(ctx, last.p),
                   "rows=" + std::to_string(cfg.M * cfg.N) + " cols=3");
  out.write_text("plate_centerline.csv", plate_centerline_csv(ctx, last.w),
                 "rows=" + std::to_string(cfg.M) + " cols=2");

  info << "quasistatic run: M=" << cfg.M << " N=" << cfg.N << " N3=" << cfg.N3
       << " steps=" << run.states.size() - 1 << "\n";
  info << "final t=" << format_double(last.t)
       << " energy=" << format_double(last.energy)
       << " cg_total=" << run.total_cg_iterations << "\n";
}

void drive_inertial(const RunConfig& cfg, OutputDir& out,
                  std::ostringstream& info) {
  OperatorContext ctx = make_configured_context(cfg);
  SourceTerms sources = configured_sources(cfg, ctx);
  InitialData init = configured_initial(cfg, ctx);
  InertialOptions opts;
  opts.scheme = cfg.scheme == "crank-nicolson" ? TimeScheme::CrankNicolson
                                               : TimeScheme::BackwardEuler;
  opts.d0_pairs_with_velocity = cfg.d0_convention == "velocity";
  InertialRun run = run_inertial(ctx, init, sources, cfg.T, cfg.tau, opts);

  out.write_text("timeseries.csv", inertial_timeseries_csv(ctx, run),
                 "rows=" + std::to_string(run.states.size()) + " cols=5");
  if (cfg.snapshot_every > 0) {
    for (std::size_t n = 0; n < run.states.size();
         n += static_cast<std::size_t>(cfg.snapshot_every)) {
      out.write_pressure_snapshot(snapshot_name("pressure", static_cast<int>(n)),
                                  ctx.basis, ctx.grid, run.states[n].p);
      out.write_plate_snapshot(snapshot_name("plate", static_cast<int>(n)),
                               ctx.basis, run.states[n].w);
    }
  }
  const InertialState& last = run.states.back();
  out.write_pressure_snapshot("pressure_final.bin", ctx.basis, ctx.grid,
                              last.p);
  out.write_plate_snapshot("plate_final.bin", ctx.basis, last.w);
  out.write_plate_snapshot("velocity_final.bin", ctx.basis, last.v);
  if (cfg.N3 % 2 == 1)
    out.write_text("midplane_pressure.csv", midplane_pressure_csv(ctx, last.p),
                   "rows=" + std::to_string(cfg.M * cfg.N) + " cols=3");
  out.write_text("plate_centerline.csv", plate_centerline_csv(ctx, last.w),
                 "rows=" + std::to_string(cfg.M) + " cols=2");

  info << "inertial run (" << cfg.scheme << "): M=" << cfg.M << " N=" << cfg.N
       << " N3=" << cfg.N3 << " steps=" << run.states.size() - 1 << "\n";
  info << "final t=" << format_double(last.t)
       << " energy=" << format_double(last.energy) << "\n";
}

int drive_verify(OutputDir& out, std::ostringstream& checks,
               std::ostringstream& info) {
  CheckList all = verify_all();
  int failed = 0;
  for (const CheckResult& c : all.checks) {
    checks << format_check(c) << "\n";
    if (!c.pass) ++failed;
  }
  checks << "SUMMARY " << all.checks.size() << " checks, " << failed
         << " failed\n";
  out.write_text("checks.csv", checks_csv(all.checks),
                 "rows=" + std::to_string(all.checks.size()) + " cols=5");
  info << "verification suites complete\n";
  return all.all_pass() ? 0 : 2;
}

void drive_convergence(OutputDir& out, std::ostringstream& info) {
  ConvergenceStudy time_study = qs_time_convergence(
      {1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0}, 129, 0.5);
  ConvergenceStudy space_study =
      qs_space_convergence({9, 17, 33, 65}, 1e-4, 0.01);
  out.write_text("convergence.csv",
                 convergence_csv({{"time", time_study}, {"space", space_study}}),
                 "rows=" + std::to_string(time_study.scales.size() +
                                          space_study.scales.size()) +
                     " cols=3");
  info << "time refinement: observed order "
       << format_double(time_study.observed_order) << "\n";
  info << "space refinement: observed order "
       << format_double(space_study.observed_order) << "\n";
}

}  // namespace

DriverResult run_driver(const RunConfig& config, const std::string& out_dir,
                        bool quiet) {
  OutputDir out(out_dir);
  out.write_text("config_echo.cfg", echo_config(config), "key-value");

  std::ostringstream checks;  // always surfaced
  std::ostringstream info;    // suppressed by quiet
  DriverResult result;

  switch (config.mode) {
    case RunMode::Quasistatic:
      drive_quasistatic(config, out, info);
      break;
    case RunMode::Inertial:
      drive_inertial(config, out, info);
      break;
    case RunMode::Verify:
      result.exit_code = drive_verify(out, checks, info);
      break;
    case RunMode::Convergence:
      drive_convergence(out, info);
      break;
  }

  out.write_manifest();
  for (const std::string& name : out.files())
    info << "wrote " << out_dir << "/" << name << "\n";

  result.summary = checks.str();
  if (!quiet) result.summary += info.str();
  result.files = out.files();
  return result;
}

}  // namespace poroplate

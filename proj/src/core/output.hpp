#pragma once
/**
 * @file output.hpp
 * @brief Deterministic run artifacts: CSV time series, plot-ready CSV
 *        slices, flat binary field snapshots, and the sidecar manifest.
 *
 * Every number is rendered with %.17g so identical runs produce byte-
 * identical files. Binary snapshots carry a 16-byte header — the 8-byte
 * magic "POROPLT\0", a little-endian uint32 format version (1), and a
 * little-endian uint32 payload kind (1 = plate coefficient vector,
 * 2 = pressure field) — followed by the payload as little-endian 64-bit
 * floats in mode-major, x3-minor order (mode index q = (m-1) N + (n-1)
 * outer, transverse node j inner). The manifest lists every written file
 * with its shape so a reader needs no other context.
 */

#include <string>
#include <utility>
#include <vector>

#include "core/discretization.hpp"
#include "core/inertial.hpp"
#include "core/quasistatic.hpp"
#include "core/verify.hpp"

namespace poroplate {

/// Collects written files and renders the sidecar manifest.
class OutputDir {
 public:
  /// Creates `dir` (and parents) if missing; IoError on failure.
  explicit OutputDir(std::string dir);

  const std::string& dir() const { return dir_; }
  /// Names of the files written so far, in write order.
  const std::vector<std::string>& files() const { return files_; }

  /// Write a text file and record it with the given shape note.
  void write_text(const std::string& name, const std::string& content,
                  const std::string& shape);

  /// Binary plate snapshot: header then M*N coefficients.
  void write_plate_snapshot(const std::string& name, const SineBasis& basis,
                            const PlateField& field);

  /// Binary pressure snapshot: header then M*N*N3 values, mode-major.
  void write_pressure_snapshot(const std::string& name, const SineBasis& basis,
                               const TransverseGrid& grid,
                               const PressureField& field);

  /// Render and write "manifest.txt" (one line per recorded file).
  void write_manifest();

 private:
  void write_binary(const std::string& name, unsigned kind,
                    const double* data, std::size_t count,
                    const std::string& shape);

  std::string dir_;
  std::vector<std::string> files_;
  std::vector<std::string> manifest_lines_;
};

/// Time series of a quasi-static run:
/// t, energy, pressure_l2, w_l2, zeta_l2, cg_iterations, cg_residual.
std::string qs_timeseries_csv(const OperatorContext& ctx, const QSRun& run);

/// Time series of an inertial run: t, energy, w_l2, v_l2, pressure_l2.
std::string inertial_timeseries_csv(const OperatorContext& ctx,
                                    const InertialRun& run);

/// Plot slice: pressure on the collocation grid at the mid-thickness
/// x3 = 0 (columns x1, x2, p). Requires odd N3 so the midplane is a node.
std::string midplane_pressure_csv(const OperatorContext& ctx,
                                  const PressureField& p);

/// Plot slice: plate deflection along the centerline x2 = 1/2 (columns
/// x1, w), sampled at the in-plane collocation abscissae.
std::string plate_centerline_csv(const OperatorContext& ctx,
                                 const PlateField& w);

/// One row per verification check: suite, name, pass, value, bound.
std::string checks_csv(const std::vector<CheckResult>& checks);

/// One row per convergence rung: study label, scale, error.
std::string convergence_csv(
    const std::vector<std::pair<std::string, ConvergenceStudy>>& studies);

}  // namespace poroplate

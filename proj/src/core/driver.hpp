#pragma once
/**
 * @file driver.hpp
 * @brief Run orchestration: realize a RunConfig, execute the configured
 *        mode, write all artifacts and build the text summary.
 *
 * The driver is the single entry the library boundary calls. It writes
 * the effective-configuration echo, the mode's data files, and the
 * manifest into the output directory, and reports through the returned
 * summary/exit code rather than printing. Solver and validation failures
 * propagate as the core exception types for the boundary to map.
 *
 * Exit codes: 0 success; 2 when the verify mode records any failed check.
 */

#include <string>
#include <vector>

#include "core/config.hpp"

namespace poroplate {

struct DriverResult {
  int exit_code = 0;
  std::string summary;             ///< check lines and (unless quiet) info lines
  std::vector<std::string> files;  ///< files written, in write order
};

DriverResult run_driver(const RunConfig& config, const std::string& out_dir,
                        bool quiet);

}  // namespace poroplate

#ifndef DNCH_RUNNER_HPP
#define DNCH_RUNNER_HPP

#include <string>

#include "dnch/config.hpp"
#include "dnch/diagnostics.hpp"

namespace dnch {

/// Batch run orchestration: executes the configured command, writes CSV/JSONL
/// artifacts into the output directory, and maps failures to exit codes
///   0 success, 1 config error, 2 solver non-convergence or NaN,
///   3 failed diagnose assertion.

struct DiagnoseResult {
  double energy_violation = 0.0;
  double energy_tolerance = 0.0;
  double flux_violation = 0.0;
  double flux_tolerance = 1e-12;
  BoundReport bounds;
  bool finite = true;  // every emitted number is finite
  bool pass = false;
};

/// Post-hoc checks on a completed trajectory; pure, usable from tests.
DiagnoseResult diagnose_trajectory(const Trajectory& traj);

int run(const RunConfig& cfg);

}  // namespace dnch

#endif

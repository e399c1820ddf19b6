#ifndef DNCH_IO_HPP
#define DNCH_IO_HPP

#include <string>
#include <vector>

#include "dnch/asymptotics.hpp"
#include "dnch/stepper.hpp"

namespace dnch {

/// Machine-readable emitters. CSV: `,` separator, `.` decimal, no locale,
/// shortest round-trip formatting. JSONL: one record per line, fixed key
/// order.

std::string format_number(double v);

/// Snapshot rows (step, t, u_0.., mu_0.., xi_0..) at the given step indices.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<int>& snapshot_steps);

/// Scalar series: t, F, D_grad, D_visc, D_beta, S, C, mass, flux_left,
/// flux_right, newton_iters, residual.
void write_series_csv(const std::string& path, const Trajectory& traj);

/// Default snapshot selection: 9 evenly spaced steps.
std::vector<int> default_snapshots(int total_steps, int count = 9);

void write_lines(const std::string& path,
                 const std::vector<std::string>& lines);

}  // namespace dnch

#endif

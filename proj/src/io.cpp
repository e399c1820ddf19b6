#include "dnch/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dnch/grid.hpp"

namespace dnch {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_lines(const std::string& path,
                 const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (const auto& l : lines) out << l << '\n';
}

std::vector<int> default_snapshots(int total_steps, int count) {
  std::vector<int> out;
  if (total_steps <= 0) return out;
  if (count > total_steps) count = total_steps;
  for (int j = 0; j < count; ++j) {
    // evenly spaced, always including the final step
    int k = 1 + static_cast<int>(std::llround(
                    static_cast<double>(j) * (total_steps - 1) / (count - 1 > 0 ? count - 1 : 1)));
    if (out.empty() || k != out.back()) out.push_back(k);
  }
  return out;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<int>& snapshot_steps) {
  const int N = traj.spec.grid.N;
  std::vector<std::string> lines;
  std::string header = "step,t";
  for (int i = 0; i < N; ++i) header += ",u_" + std::to_string(i);
  for (int i = 0; i < N; ++i) header += ",mu_" + std::to_string(i);
  for (int i = 0; i < N; ++i) header += ",xi_" + std::to_string(i);
  for (int i = 0; i < N; ++i) header += ",w_" + std::to_string(i);
  lines.push_back(header);
  for (int k : snapshot_steps) {
    if (k < 1 || k > static_cast<int>(traj.states.size())) continue;
    const StepState& st = traj.states[static_cast<std::size_t>(k - 1)];
    std::string row = std::to_string(st.k) + "," + format_number(st.t);
    for (int i = 0; i < N; ++i) row += "," + format_number(st.u[i]);
    for (int i = 0; i < N; ++i) row += "," + format_number(st.mu[i]);
    for (int i = 0; i < N; ++i) row += "," + format_number(st.xi[i]);
    for (int i = 0; i < N; ++i) row += "," + format_number(st.w[i]);
    lines.push_back(row);
  }
  write_lines(path, lines);
}

void write_series_csv(const std::string& path, const Trajectory& traj) {
  std::vector<std::string> lines;
  lines.push_back(
      "t,F,D_grad,D_visc,D_beta,S,C,mass,flux_left,flux_right,"
      "newton_iters,residual");
  const Grid1D& g = traj.spec.grid;
  const EnergyLedger& led = traj.ledger;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const StepState& st = traj.states[k];
    const auto [fl, fr] = boundary_flux(g, st.mu);
    std::string row = format_number(st.t);
    row += "," + format_number(led.F[k]);
    row += "," + format_number(led.D_grad[k]);
    row += "," + format_number(led.D_visc[k]);
    row += "," + format_number(led.D_beta[k]);
    row += "," + format_number(led.S[k]);
    row += "," + format_number(led.C[k]);
    row += "," + format_number(g.h * st.u.sum());
    row += "," + format_number(fl);
    row += "," + format_number(fr);
    row += "," + std::to_string(st.newton_iters);
    row += "," + format_number(st.residual);
    lines.push_back(row);
  }
  write_lines(path, lines);
}

}  // namespace dnch

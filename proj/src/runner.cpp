#include "dnch/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <json.hpp>

#include "dnch/asymptotics.hpp"
#include "dnch/io.hpp"
#include "dnch/presets.hpp"

namespace dnch {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string graph_name(const GraphSpec& g) {
  switch (g.kind) {
    case GraphKind::Zero: return "zero";
    case GraphKind::Sign: return "sign";
    case GraphKind::Power: return "power";
    case GraphKind::PiecewiseLinear: return "piecewise_linear";
  }
  return "zero";
}

std::string potential_name(const PotentialSpec& p) {
  switch (p.kind) {
    case PotentialKind::DoubleWell: return "double_well";
    case PotentialKind::Logarithmic: return "logarithmic";
    case PotentialKind::Polynomial: return "polynomial";
  }
  return "double_well";
}

// Reproducibility contract: every parameter that influences the computation.
void print_header(const RunConfig& cfg, std::ostream& os) {
  const ProblemSpec& s = cfg.problem;
  os << "# command = " << command_name(cfg.command) << '\n';
  if (!cfg.preset.empty()) os << "# preset = " << cfg.preset << '\n';
  os << "# eps = " << format_number(s.eps) << '\n'
     << "# delta = " << format_number(s.delta) << '\n'
     << "# lambda = " << format_number(s.lambda) << '\n'
     << "# tau = " << format_number(s.tau) << '\n'
     << "# T = " << format_number(s.T) << '\n'
     << "# L = " << format_number(s.grid.L) << '\n'
     << "# N = " << s.grid.N << '\n'
     << "# graph = " << graph_name(s.graph) << '\n';
  if (s.graph.kind == GraphKind::Power)
    os << "# graph_p = " << format_number(s.graph.power_p) << '\n'
       << "# graph_coeff = " << format_number(s.graph.power_coeff) << '\n';
  os << "# potential = " << potential_name(s.potential) << '\n'
     << "# K = " << format_number(s.potential.K) << '\n';
  if (s.potential.kind == PotentialKind::DoubleWell)
    os << "# scale = " << format_number(s.potential.dw_scale) << '\n'
       << "# well = " << format_number(s.potential.dw_well) << '\n';
  if (s.potential.kind == PotentialKind::Logarithmic)
    os << "# c = " << format_number(s.potential.log_c) << '\n'
       << "# c0 = " << format_number(s.potential.log_c0) << '\n';
  os << "# a0 = " << format_number(s.a0) << '\n'
     << "# b0 = " << format_number(s.b0) << '\n'
     << "# seed = " << cfg.seed << '\n'
     << "# output = " << cfg.output << '\n';
}

bool all_finite(const Eigen::ArrayXd& v) { return v.isFinite().all(); }

bool trajectory_finite(const Trajectory& traj) {
  for (const StepState& st : traj.states)
    if (!all_finite(st.u) || !all_finite(st.mu) || !all_finite(st.w) ||
        !all_finite(st.xi) || !std::isfinite(st.residual))
      return false;
  for (std::size_t k = 0; k < traj.ledger.F.size(); ++k)
    if (!std::isfinite(traj.ledger.F[k]) ||
        !std::isfinite(traj.ledger.D_grad[k]) ||
        !std::isfinite(traj.ledger.D_beta[k]))
      return false;
  return true;
}

void append_jsonl(const std::string& path, const ordered_json& rec) {
  std::ofstream out(path, std::ios::app);
  out << rec.dump() << '\n';
}

void write_failure_marker(const RunConfig& cfg, const std::string& what) {
  if (!cfg.emit_jsonl) return;
  ordered_json rec;
  rec["record"] = "failure";
  rec["command"] = command_name(cfg.command);
  rec["error"] = what;
  append_jsonl(cfg.output + "/run.jsonl", rec);
}

void emit_trajectory(const RunConfig& cfg, const Trajectory& traj) {
  if (cfg.emit_csv) {
    write_trajectory_csv(cfg.output + "/trajectory.csv", traj,
                         default_snapshots(static_cast<int>(traj.states.size())));
    write_series_csv(cfg.output + "/series.csv", traj);
  }
  if (cfg.emit_jsonl) {
    ordered_json rec;
    rec["record"] = "run";
    rec["command"] = command_name(cfg.command);
    rec["steps"] = static_cast<int>(traj.states.size());
    rec["F0"] = traj.ledger.F0;
    rec["F_final"] = traj.ledger.F.empty() ? traj.ledger.F0
                                           : traj.ledger.F.back();
    rec["energy_violation"] = energy_inequality_check(traj);
    rec["flux_violation"] = flux_identity_check(traj);
    append_jsonl(cfg.output + "/run.jsonl", rec);
  }
}

ordered_json rate_point_record(const RatePoint& p, SweepParam param) {
  ordered_json rec;
  rec["record"] = "rate-point";
  rec["param"] = p.param;
  rec["err_mu_l2v0"] = p.err_mu_l2v0;
  rec["err_u_h1h"] = p.err_u_h1h;
  rec["err_total"] = p.err_total;
  if (param == SweepParam::Delta) {
    rec["rhs"] = p.rhs;
    rec["data_u0"] = p.data_u0;
    rec["data_g"] = p.data_g;
  } else {
    rec["witness"] = p.witness;
  }
  return rec;
}

void emit_rate_report(const RunConfig& cfg, const RateReport& rep,
                      SweepParam param) {
  if (cfg.emit_jsonl) {
    const std::string path = cfg.output + "/rates.jsonl";
    for (const RatePoint& p : rep.points)
      append_jsonl(path, rate_point_record(p, param));
    ordered_json rec;
    rec["record"] = "rate-summary";
    rec["parameter"] = param == SweepParam::Delta ? "delta" : "eps";
    rec["slope"] = rep.slope;
    rec["fit_residual"] = rep.fit_residual;
    if (param == SweepParam::Eps) rec["witness_slope"] = rep.witness_slope;
    if (param == SweepParam::Delta) rec["fitted_C"] = rep.fitted_C;
    rec["reference"] = rep.reference;
    append_jsonl(path, rec);
  }
  if (cfg.emit_csv) {
    std::vector<std::string> lines;
    lines.push_back("param,err_mu_l2v0,err_u_h1h,err_total,rhs,witness");
    for (const RatePoint& p : rep.points)
      lines.push_back(format_number(p.param) + "," +
                      format_number(p.err_mu_l2v0) + "," +
                      format_number(p.err_u_h1h) + "," +
                      format_number(p.err_total) + "," + format_number(p.rhs) +
                      "," + format_number(p.witness));
    write_lines(cfg.output + "/rates.csv", lines);
  }
  if (!cfg.quiet)
    std::cout << "slope = " << format_number(rep.slope) << "  ("
              << rep.reference << ")\n";
}

int run_solve(const RunConfig& cfg) {
  const Trajectory traj = solve(cfg.problem);
  if (!trajectory_finite(traj)) {
    write_failure_marker(cfg, "non-finite value in trajectory");
    return 2;
  }
  emit_trajectory(cfg, traj);
  if (!cfg.quiet)
    std::cout << "solved " << traj.states.size() << " steps, F = "
              << format_number(traj.ledger.F.back()) << '\n';
  return 0;
}

int run_diagnose(const RunConfig& cfg) {
  const Trajectory traj = solve(cfg.problem);
  const DiagnoseResult d = diagnose_trajectory(traj);
  emit_trajectory(cfg, traj);
  if (cfg.emit_jsonl) {
    ordered_json rec;
    rec["record"] = "diagnose";
    rec["energy_violation"] = d.energy_violation;
    rec["energy_tolerance"] = d.energy_tolerance;
    rec["flux_violation"] = d.flux_violation;
    rec["flux_tolerance"] = d.flux_tolerance;
    rec["bounds_pass"] = d.bounds.pass;
    rec["u_min"] = d.bounds.u_min;
    rec["u_max"] = d.bounds.u_max;
    rec["a0_prime"] = d.bounds.a0_prime;
    rec["b0_prime"] = d.bounds.b0_prime;
    rec["finite"] = d.finite;
    rec["pass"] = d.pass;
    append_jsonl(cfg.output + "/run.jsonl", rec);
  }
  if (!cfg.quiet)
    std::cout << "diagnose: " << (d.pass ? "pass" : "FAIL")
              << "  energy " << format_number(d.energy_violation) << "  flux "
              << format_number(d.flux_violation) << '\n';
  if (!d.finite) return 2;
  return d.pass ? 0 : 3;
}

int run_sweep(const RunConfig& cfg, SweepParam param) {
  SweepConfig sc;
  sc.base = cfg.problem;
  sc.parameter = param;
  sc.values = cfg.sweep_values;
  if (sc.values.empty())
    sc.values = param == SweepParam::Delta
                    ? std::vector<double>{1e-2, 1e-3, 1e-4, 1e-5}
                    : std::vector<double>{1e-1, 1e-2, 1e-3};
  const RateReport rep =
      param == SweepParam::Delta ? delta_sweep(sc) : eps_sweep(sc);
  for (const RatePoint& p : rep.points)
    if (!std::isfinite(p.err_total)) {
      write_failure_marker(cfg, "non-finite sweep error");
      return 2;
    }
  emit_rate_report(cfg, rep, param);
  return 0;
}

int run_probe(const RunConfig& cfg) {
  std::vector<double> scales = cfg.probe_scales;
  if (scales.empty()) scales = {1e-1, 1e-2, 1e-3, 1e-4};
  const ProbeReport rep = continuous_dependence_probe(cfg.problem, scales);
  if (cfg.emit_jsonl) {
    const std::string path = cfg.output + "/probe.jsonl";
    for (const ProbePoint& p : rep.points) {
      ordered_json rec;
      rec["record"] = "probe-point";
      rec["eta"] = p.eta;
      rec["lhs"] = p.lhs;
      rec["rhs"] = p.rhs;
      rec["ratio"] = p.ratio;
      append_jsonl(path, rec);
    }
    ordered_json rec;
    rec["record"] = "probe-summary";
    rec["max_ratio"] = rep.max_ratio;
    rec["min_ratio"] = rep.min_ratio;
    append_jsonl(path, rec);
  }
  for (const ProbePoint& p : rep.points)
    if (!std::isfinite(p.ratio)) return 2;
  if (!cfg.quiet)
    std::cout << "dependence ratio in [" << format_number(rep.min_ratio)
              << ", " << format_number(rep.max_ratio) << "]\n";
  return 0;
}

// Structural self-checks on the scalar graph toolkit: resolvent equation
// residual, nonexpansiveness, Yosida bound, Young equality at (res, yosida).
int run_check_graphs(const RunConfig& cfg) {
  std::vector<std::pair<std::string, GraphSpec>> graphs = {
      {"zero", GraphSpec::zero()},
      {"sign", GraphSpec::sign()},
      {"power(1)", GraphSpec::power(1.0, 1.0)},
      {"power(3)", GraphSpec::power(3.0, 1.0)},
      {"piecewise_linear", GraphSpec::piecewise_linear({-1.0, 1.0},
                                                       {2.0, 0.5, 2.0})}};
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> rdist(-10.0, 10.0);
  std::uniform_real_distribution<double> ldist(-6.0, 0.0);
  int failures = 0;
  for (const auto& [name, g] : graphs) {
    double worst_eq = 0.0, worst_nonexp = 0.0, worst_young = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const double lam = std::pow(10.0, ldist(rng));
      const double r = rdist(rng);
      const double s = resolvent(g, lam, r);
      const double y = yosida(g, lam, r);
      if (g.kind != GraphKind::Sign || std::abs(r) > lam + 1e-12)
        worst_eq = std::max(worst_eq,
                            std::abs(s + lam * beta_eval(g, s) - r));
      const double r2 = rdist(rng);
      const double s2 = resolvent(g, lam, r2);
      if (std::abs(s - s2) > std::abs(r - r2) + 1e-12)
        worst_nonexp = std::max(worst_nonexp,
                                std::abs(s - s2) - std::abs(r - r2));
      // Young equality: beta_hat(s) + conj(y) = s * y since y in beta(s).
      const double young =
          beta_hat(g, s) + conjugate_eval(g, y) - s * y;
      if (std::isfinite(young))
        worst_young = std::max(worst_young, std::abs(young));
      if (y < -1e-12 / lam && r > 0) ++failures;
    }
    const bool ok =
        worst_eq <= 1e-9 && worst_nonexp <= 1e-12 && worst_young <= 1e-8;
    if (!ok) ++failures;
    if (!cfg.quiet)
      std::cout << (ok ? "pass" : "FAIL") << "  " << name
                << "  eq " << format_number(worst_eq) << "  young "
                << format_number(worst_young) << '\n';
    if (cfg.emit_jsonl) {
      ordered_json rec;
      rec["record"] = "graph-check";
      rec["graph"] = name;
      rec["resolvent_eq"] = worst_eq;
      rec["nonexpansive_excess"] = worst_nonexp;
      rec["young_gap"] = worst_young;
      rec["pass"] = ok;
      append_jsonl(cfg.output + "/run.jsonl", rec);
    }
  }
  return failures == 0 ? 0 : 3;
}

}  // namespace

DiagnoseResult diagnose_trajectory(const Trajectory& traj) {
  DiagnoseResult d;
  d.energy_violation = energy_inequality_check(traj);
  d.energy_tolerance = 1e-8 * std::max(1.0, std::abs(traj.ledger.F0));
  d.flux_violation = flux_identity_check(traj);
  d.bounds = max_principle_report(traj.spec, traj);
  d.finite = trajectory_finite(traj);
  d.pass = d.finite && d.energy_violation <= d.energy_tolerance &&
           d.flux_violation <= d.flux_tolerance && d.bounds.pass;
  return d;
}

int run(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << cfg.output
              << '\n';
    return 1;
  }
  if (!cfg.quiet) print_header(cfg, std::cout);
  try {
    switch (cfg.command) {
      case Command::Solve: return run_solve(cfg);
      case Command::Diagnose: return run_diagnose(cfg);
      case Command::SweepDelta: return run_sweep(cfg, SweepParam::Delta);
      case Command::SweepEps: return run_sweep(cfg, SweepParam::Eps);
      case Command::ProbeDependence: return run_probe(cfg);
      case Command::CheckGraphs: return run_check_graphs(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const NonConvergence& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    write_failure_marker(cfg, e.what());
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    write_failure_marker(cfg, e.what());
    return 2;
  }
  return 1;
}

}  // namespace dnch

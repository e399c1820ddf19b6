#include "dnch/asymptotics.hpp"

#include <algorithm>
#include <cmath>

namespace dnch {

Eigen::ArrayXd smooth_data(const Grid1D& g, const Eigen::ArrayXd& f,
                           double alpha) {
  if (alpha <= 0.0) return f;
  Eigen::MatrixXd A =
      Eigen::MatrixXd::Identity(g.N, g.N) - alpha * lap_neumann_matrix(g);
  Eigen::ArrayXd v = A.partialPivLu().solve(f.matrix()).array();
  // Discrete maximum principle: clip roundoff excursions past the range.
  const double lo = f.minCoeff(), hi = f.maxCoeff();
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  return v.min(hi + slack).max(lo - slack);
}

DeltaData prepare_delta_data(const ProblemSpec& spec, double delta) {
  DeltaData out;
  if (delta <= 0.0) {
    out.u0 = spec.u0;
    out.forcing = spec.forcing;
    out.u0_discrepancy = 0.0;
    out.g_discrepancy = 0.0;
    return out;
  }
  const double alpha = std::sqrt(delta);
  const Grid1D grid = spec.grid;
  out.u0 = smooth_data(grid, spec.u0, alpha);
  out.u0_discrepancy = norm_l2(grid, (out.u0 - spec.u0).eval());

  ForcingRule base = spec.forcing;
  if (base) {
    out.forcing = [base, alpha](const Grid1D& g, double t) {
      return smooth_data(g, base(g, t), alpha);
    };
  } else {
    out.forcing = nullptr;  // smoothing fixes zero
  }

  double acc = 0.0;
  const int M = spec.steps();
  for (int k = 1; k <= M; ++k) {
    const double t = k * spec.tau;
    const Eigen::ArrayXd g0 = spec.forcing_at(t);
    const Eigen::ArrayXd g1 =
        out.forcing ? out.forcing(grid, t) : Eigen::ArrayXd::Zero(grid.N);
    const double d = norm_l2(grid, (g1 - g0).eval());
    acc += spec.tau * d * d;
  }
  out.g_discrepancy = std::sqrt(acc);
  return out;
}

ForcingRule prepare_eps_forcing(const ForcingRule& g, double eps) {
  if (!g) return nullptr;  // truncation fixes zero
  return [g, eps](const Grid1D& grid, double t) {
    Eigen::ArrayXd v = g(grid, t);
    for (int i = 0; i < v.size(); ++i) v[i] = truncation(eps, v[i]);
    return v;
  };
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& values) {
  if (values.size() < 3)
    throw ConfigError("fit_rate needs at least 3 points");
  bool all_tiny = true;
  for (const auto& [p, e] : values)
    if (e >= 1e-13) all_tiny = false;
  if (all_tiny) throw DegenerateFit("all errors below resolution: exact");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(values.size());
  std::vector<double> xs, ys;
  for (const auto& [p, e] : values) {
    const double x = std::log(p), y = std::log(e);
    xs.push_back(x);
    ys.push_back(y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - fit.slope * sx) / n;
  for (std::size_t i = 0; i < xs.size(); ++i)
    fit.residual = std::max(
        fit.residual, std::abs(ys[i] - (intercept + fit.slope * xs[i])));
  return fit;
}

namespace {

void check_sweep_config(const SweepConfig& cfg) {
  if (cfg.values.size() < 3)
    throw ConfigError("sweep needs at least 3 parameter values");
  for (std::size_t i = 0; i < cfg.values.size(); ++i) {
    if (cfg.values[i] <= 0.0)
      throw ConfigError("sweep values must be positive");
    if (i > 0 && cfg.values[i] >= cfg.values[i - 1])
      throw ConfigError("sweep values must be strictly decreasing");
  }
}

}  // namespace

RateReport delta_sweep(const SweepConfig& cfg) {
  check_sweep_config(cfg);
  if (cfg.parameter != SweepParam::Delta)
    throw ConfigError("delta_sweep: parameter must be delta");
  if (!(cfg.base.eps > 0.0))
    throw ConfigError("delta_sweep: base eps must be positive");

  // Reference: delta = 0 solve with un-smoothed data, shared lambda/tau/grid.
  ProblemSpec ref_spec = cfg.base;
  ref_spec.delta = 0.0;
  const Trajectory ref = solve(ref_spec);

  RateReport rep;
  rep.reference = "limit solve delta=0";
  for (double delta : cfg.values) {
    ProblemSpec s = cfg.base;
    s.delta = delta;
    DeltaData data = prepare_delta_data(cfg.base, delta);
    s.u0 = data.u0;
    s.forcing = data.forcing;
    Trajectory traj;
    try {
      traj = solve(s);
    } catch (NonConvergence& e) {
      throw NonConvergence("delta_sweep member delta=" + std::to_string(delta) +
                               ": " + e.what(),
                           e.step, e.residual);
    }
    RatePoint pt;
    pt.param = delta;
    pt.err_mu_l2v0 = difference_norm(traj, ref, SpaceTimeNorm::L2V0);
    pt.err_u_h1h = difference_norm(traj, ref, SpaceTimeNorm::H1H);
    pt.err_total = pt.err_mu_l2v0 + pt.err_u_h1h;
    pt.data_u0 = data.u0_discrepancy;
    pt.data_g = data.g_discrepancy;
    pt.rhs = std::pow(delta, 0.25) + data.u0_discrepancy + data.g_discrepancy;
    rep.points.push_back(pt);
  }

  std::vector<std::pair<double, double>> pairs;
  for (const auto& pt : rep.points) pairs.emplace_back(pt.param, pt.err_total);
  try {
    const RateFit fit = fit_rate(pairs);
    rep.slope = fit.slope;
    rep.fit_residual = fit.residual;
  } catch (const DegenerateFit&) {
    rep.slope = std::numeric_limits<double>::quiet_NaN();
  }
  for (const auto& pt : rep.points)
    rep.fitted_C = std::max(rep.fitted_C, pt.err_total / pt.rhs);
  return rep;
}

RateReport eps_sweep(const SweepConfig& cfg) {
  check_sweep_config(cfg);
  if (cfg.parameter != SweepParam::Eps)
    throw ConfigError("eps_sweep: parameter must be eps");
  if (!(cfg.base.delta > 0.0))
    throw ConfigError("eps_sweep: base delta must be positive");

  ProblemSpec ref_spec = cfg.base;
  ref_spec.eps = 0.0;
  const Trajectory ref = solve(ref_spec);

  RateReport rep;
  rep.reference = "limit solve eps=0";
  for (double eps : cfg.values) {
    ProblemSpec s = cfg.base;
    s.eps = eps;
    s.forcing = prepare_eps_forcing(cfg.base.forcing, eps);
    Trajectory traj;
    try {
      traj = solve(s);
    } catch (NonConvergence& e) {
      throw NonConvergence("eps_sweep member eps=" + std::to_string(eps) +
                               ": " + e.what(),
                           e.step, e.residual);
    }
    RatePoint pt;
    pt.param = eps;
    pt.err_mu_l2v0 = difference_norm(traj, ref, SpaceTimeNorm::L2V0);
    pt.err_u_h1h = difference_norm(traj, ref, SpaceTimeNorm::H1H);
    pt.err_total = pt.err_mu_l2v0 + pt.err_u_h1h;
    double wmax = 0.0;
    for (const auto& st : traj.states)
      wmax = std::max(wmax, norm_l2(s.grid, st.w));
    pt.witness = eps * wmax;
    rep.points.push_back(pt);
  }

  std::vector<std::pair<double, double>> epairs, wpairs;
  for (const auto& pt : rep.points) {
    epairs.emplace_back(pt.param, pt.err_total);
    wpairs.emplace_back(pt.param, pt.witness);
  }
  try {
    const RateFit efit = fit_rate(epairs);
    rep.slope = efit.slope;
    rep.fit_residual = efit.residual;
  } catch (const DegenerateFit&) {
    rep.slope = std::numeric_limits<double>::quiet_NaN();
  }
  try {
    rep.witness_slope = fit_rate(wpairs).slope;
  } catch (const DegenerateFit&) {
    rep.witness_slope = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

ProbeReport continuous_dependence_probe(const ProblemSpec& spec,
                                        const std::vector<double>& scales) {
  if (!(spec.eps > 0.0 && spec.delta > 0.0))
    throw ConfigError("continuous_dependence_probe requires eps, delta > 0");
  const Grid1D grid = spec.grid;
  const double pi = 3.14159265358979323846;

  // Fixed smooth perturbation profiles.
  Eigen::ArrayXd u_profile(grid.N), g_profile(grid.N);
  for (int i = 0; i < grid.N; ++i) {
    const double x = grid.cell_center(i);
    u_profile[i] = std::cos(2.0 * pi * x / grid.L);
    g_profile[i] = std::sin(pi * x / grid.L);
  }

  const Trajectory base = solve(spec);
  ProbeReport rep;
  for (double eta : scales) {
    ProblemSpec pert = spec;
    pert.u0 = spec.u0 + eta * u_profile;
    pert.a0 = std::min(pert.a0, pert.u0.minCoeff());
    pert.b0 = std::max(pert.b0, pert.u0.maxCoeff());
    ForcingRule base_g = spec.forcing;
    Eigen::ArrayXd gp = g_profile;
    pert.forcing = [base_g, gp, eta](const Grid1D& g, double t) {
      Eigen::ArrayXd v = base_g ? base_g(g, t).eval()
                                : Eigen::ArrayXd::Zero(g.N).eval();
      return (v + eta * gp).eval();
    };
    const Trajectory other = solve(pert);

    ProbePoint pt;
    pt.eta = eta;
    const double mu_err = difference_norm(base, other, SpaceTimeNorm::L2V0);
    const double u_h1h = difference_norm(base, other, SpaceTimeNorm::H1H);
    const double u_linfv = difference_norm(base, other, SpaceTimeNorm::LinfV);
    pt.lhs = mu_err * mu_err + (u_h1h + u_linfv) * (u_h1h + u_linfv);

    const Eigen::ArrayXd du0 = (pert.u0 - spec.u0).eval();
    const double du0_l2 = norm_l2(grid, du0);
    const double du0_semi = h1_seminorm(grid, du0, Bc::Neumann);
    double g_acc = 0.0;
    for (int k = 1; k <= spec.steps(); ++k) {
      const double t = k * spec.tau;
      const Eigen::ArrayXd dg =
          (pert.forcing(grid, t) - spec.forcing_at(t)).eval();
      const double d = norm_l2(grid, dg);
      g_acc += spec.tau * d * d;
    }
    pt.rhs = du0_l2 * du0_l2 + du0_semi * du0_semi + g_acc;
    pt.ratio = (pt.rhs > 0.0) ? pt.lhs / pt.rhs : 0.0;
    rep.points.push_back(pt);
  }
  rep.max_ratio = 0.0;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& pt : rep.points) {
    rep.max_ratio = std::max(rep.max_ratio, pt.ratio);
    rep.min_ratio = std::min(rep.min_ratio, pt.ratio);
  }
  return rep;
}

}  // namespace dnch

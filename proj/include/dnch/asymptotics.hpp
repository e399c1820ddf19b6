#ifndef DNCH_ASYMPTOTICS_HPP
#define DNCH_ASYMPTOTICS_HPP

#include <string>
#include <vector>

#include "dnch/stepper.hpp"

namespace dnch {

/// Parameter sweeps for the vanishing-viscosity and vanishing-interface
/// limits, data preparation operators, and log-log rate fitting.

/// Solves v - alpha * lap_neumann(v) = f. Preserves the mean exactly and the
/// range up to roundoff (discrete maximum principle).
Eigen::ArrayXd smooth_data(const Grid1D& g, const Eigen::ArrayXd& f,
                           double alpha);

struct DeltaData {
  Eigen::ArrayXd u0;         // smoothed initial datum
  ForcingRule forcing;       // smoothed forcing rule
  double u0_discrepancy;     // ||u0_delta - u0||_l2
  double g_discrepancy;      // ||g_delta - g||_{L2 in time of l2}
};

/// Elliptic smoothing of the data at scale sqrt(delta); delta = 0 is the
/// identity.
DeltaData prepare_delta_data(const ProblemSpec& spec, double delta);

/// Entrywise truncation of the forcing at level 1/eps.
ForcingRule prepare_eps_forcing(const ForcingRule& g, double eps);

enum class SweepParam { Eps, Delta };
enum class RefStrategy { LimitSolve, Finest };

struct SweepConfig {
  ProblemSpec base;
  SweepParam parameter = SweepParam::Delta;
  std::vector<double> values;  // strictly decreasing, positive, >= 3
  RefStrategy reference = RefStrategy::LimitSolve;
};

struct RatePoint {
  double param = 0.0;
  double err_mu_l2v0 = 0.0;
  double err_u_h1h = 0.0;
  double err_total = 0.0;
  double rhs = 0.0;          // delta sweep: delta^{1/4} + data terms
  double witness = 0.0;      // eps sweep: V_eps = eps * max_k ||w^k||
  double data_u0 = 0.0;
  double data_g = 0.0;
};

struct RateReport {
  std::vector<RatePoint> points;  // sorted by decreasing parameter
  double slope = 0.0;             // log-log fit of err_total vs param
  double fit_residual = 0.0;
  double witness_slope = 0.0;     // eps sweep only
  double fitted_C = 0.0;          // max err_total / rhs (delta sweep)
  std::string reference;          // description of the reference solve
};

/// Theorem-2.6 style sweep: smooth data per delta, solve, compare against
/// the delta = 0 reference with shared lambda, tau and grid.
RateReport delta_sweep(const SweepConfig& cfg);

/// Theorem-2.4 style sweep: truncate the forcing at 1/eps, solve, compare
/// against the eps = 0 reference; also records the vanishing-viscosity
/// witness V_eps.
RateReport eps_sweep(const SweepConfig& cfg);

struct ProbePoint {
  double eta = 0.0;
  double lhs = 0.0;  // ||mu1-mu2||^2_{L2V0} + ||u1-u2||^2_{H1H + LinfV}
  double rhs = 0.0;  // ||u01-u02||^2_V + ||g1-g2||^2_{L2H}
  double ratio = 0.0;
};

struct ProbeReport {
  std::vector<ProbePoint> points;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
};

/// Continuous-dependence probe: perturb u0 and g by eta times fixed smooth
/// profiles and report the stability ratios.
ProbeReport continuous_dependence_probe(const ProblemSpec& spec,
                                        const std::vector<double>& scales);

struct RateFit {
  double slope = 0.0;
  double residual = 0.0;  // max absolute deviation in log space
};

/// Least-squares slope of log(error) vs log(param); throws DegenerateFit
/// when every error is below 1e-13.
RateFit fit_rate(const std::vector<std::pair<double, double>>& values);

}  // namespace dnch

#endif

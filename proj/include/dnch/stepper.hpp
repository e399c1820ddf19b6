#ifndef DNCH_STEPPER_HPP
#define DNCH_STEPPER_HPP

#include <functional>
#include <string>
#include <vector>

#include "dnch/grid.hpp"
#include "dnch/monotone.hpp"

namespace dnch {

/// Implicit-Euler Rothe stepping for the lambda-regularized system
///   w - lap_dirichlet(mu) = 0,
///   mu = eps*w + beta_lambda(w) - delta*lap_neumann(u) + lambda*u
///        + gamma_lambda(u) - K*T_lambda((I+lambda*gamma)^{-1}(u)) + g,
/// with u = u_prev + tau*w. Per step the chemical potential is eliminated and
/// the unknown is the difference quotient w.

using ForcingRule = std::function<Eigen::ArrayXd(const Grid1D&, double)>;

struct ProblemSpec {
  double eps = 1.0;      // viscosity, >= 0
  double delta = 1.0;    // gradient-energy coefficient, >= 0
  double lambda = 1e-5;  // Yosida regularization parameter, > 0
  double tau = 1e-3;     // time step
  double T = 0.1;        // horizon, integer multiple of tau
  Grid1D grid;
  GraphSpec graph;
  PotentialSpec potential;
  ForcingRule forcing;  // null means g == 0
  Eigen::ArrayXd u0;
  double a0 = -1.0;  // initial-datum bounds, [a0, b0] within (a, b)
  double b0 = 1.0;

  int steps() const;
  Eigen::ArrayXd forcing_at(double t) const;
  void validate() const;  // throws ConfigError on violated invariants
};

struct StepState {
  int k = 0;
  double t = 0.0;
  Eigen::ArrayXd u;
  Eigen::ArrayXd mu;
  Eigen::ArrayXd w;   // backward difference quotient (u^k - u^{k-1}) / tau
  Eigen::ArrayXd xi;  // beta_lambda(w), the monotone selection
  int newton_iters = 0;
  double residual = 0.0;   // sup norm of r1 at acceptance
  double tolerance = 0.0;  // acceptance tolerance, including the roundoff floor
};

/// Per-step energy accounting (free energy, dissipation, source,
/// semiconvexity correction); one entry per accepted step.
struct EnergyLedger {
  double F0 = 0.0;  // free energy of the initial datum
  std::vector<double> F;
  std::vector<double> D_grad;  // tau * |grad mu|_Dirichlet^2
  std::vector<double> D_visc;  // tau * eps * ||w||^2
  std::vector<double> D_beta;  // tau * h * sum xi w
  std::vector<double> S;       // -tau * h * sum g w
  std::vector<double> C;       // (K/2) ||u^k - u^{k-1}||^2
};

struct Trajectory {
  ProblemSpec spec;
  std::vector<StepState> states;
  EnergyLedger ledger;
};

struct StepResidual {
  Eigen::ArrayXd r1;  // w - lap_dirichlet(mu)
  Eigen::ArrayXd r2;  // identically zero; mu is eliminated by construction
  Eigen::ArrayXd mu;
};

/// Assembled residual of one implicit step at the candidate w.
StepResidual step_residual(const ProblemSpec& spec, const Eigen::ArrayXd& u_prev,
                           const Eigen::ArrayXd& w, const Eigen::ArrayXd& g_k);

/// Damped-Newton solve of one implicit step; throws NonConvergence or
/// DomainEscape.
StepState newton_step_solve(const ProblemSpec& spec,
                            const Eigen::ArrayXd& u_prev,
                            const Eigen::ArrayXd& g_k,
                            const Eigen::ArrayXd& w_init);

/// Full Rothe solve over [0, T] with warm-started Newton and a filled ledger.
Trajectory solve(const ProblemSpec& spec);

struct InitialRates {
  Eigen::ArrayXd mu0;
  Eigen::ArrayXd w0;
  Eigen::ArrayXd xi0;
};

/// Initial values (mu(0), du/dt(0), xi(0)): solves w0 = lap_dirichlet(mu0),
/// mu0 = eps*w0 + beta_lambda(w0) + z0, z0 = -delta*lap_neumann(u0)
/// + psi'(u0) + g(0). Requires eps > 0.
InitialRates initial_rates(const ProblemSpec& spec);

enum class SpaceTimeNorm { L2V0, H1H, L2H, LinfH, LinfV };

/// Rectangle-rule space-time norms of a trajectory: L2V0 acts on mu
/// (Dirichlet gradient seminorm); the others act on u, with the backward
/// difference quotient as the time derivative in H1H.
double spacetime_norms(const Trajectory& traj, SpaceTimeNorm which);

/// Same norms applied to the difference of two trajectories on a shared
/// grid and time step.
double difference_norm(const Trajectory& a, const Trajectory& b,
                       SpaceTimeNorm which);

}  // namespace dnch

#endif

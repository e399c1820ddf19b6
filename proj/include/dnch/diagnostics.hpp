#ifndef DNCH_DIAGNOSTICS_HPP
#define DNCH_DIAGNOSTICS_HPP

#include "dnch/stepper.hpp"

namespace dnch {

/// Checkable discrete counterparts of the structural estimates: energy
/// dissipation ledger, a-posteriori maximum-principle bounds, flux identity.

/// F(u) = h sum psi(u_i) + (delta/2) |grad u|_Neumann^2
///        + (lambda/2) ||u||^2.
double free_energy(const ProblemSpec& spec, const Eigen::ArrayXd& u);

/// max over steps of [F_k - F_{k-1} + D_grad + D_visc + D_beta - S - C]_+.
/// A value beyond tolerance signals a solver or assembly bug.
double energy_inequality_check(const Trajectory& traj);

struct BoundReport {
  double M = 0.0;      // sup over the run of |mu - g|
  double a_bar = 0.0;  // psi' <= -(M+1) left of a_bar
  double b_bar = 0.0;  // psi' >= M+1 right of b_bar
  double a0_prime = 0.0;
  double b0_prime = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  bool threshold_found = true;
  bool pass = false;
};

/// A-posteriori maximum-principle verification: thresholds where psi'
/// crosses -(M+1) and M+1, enlarged bounds, and the observed range of u.
BoundReport max_principle_report(const ProblemSpec& spec,
                                 const Trajectory& traj);

/// max over steps of |h sum (u^k - u^{k-1})/tau - (flux_right - flux_left)|
/// normalized by max(1, ||mu^k||_sup).
double flux_identity_check(const Trajectory& traj);

}  // namespace dnch

#endif

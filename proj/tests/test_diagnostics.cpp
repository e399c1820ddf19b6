#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dnch/diagnostics.hpp"
#include "dnch/presets.hpp"

using namespace dnch;

namespace {

// bisection oracle for the least r >= lo with psi'(r) = level
double threshold_oracle(const PotentialSpec& p, double level, double lo,
                        double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (psi_prime(p, mid) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Trajectory synthetic_constant_mu(const ProblemSpec& s, double mu_value) {
  Trajectory traj;
  traj.spec = s;
  StepState st;
  st.k = 1;
  st.t = s.tau;
  st.u = s.u0;
  st.mu = Eigen::ArrayXd::Constant(s.grid.N, mu_value);
  st.w = Eigen::ArrayXd::Zero(s.grid.N);
  st.xi = Eigen::ArrayXd::Zero(s.grid.N);
  traj.states.push_back(st);
  traj.ledger.F0 = free_energy(s, s.u0);
  traj.ledger.F = {traj.ledger.F0};
  traj.ledger.D_grad = {0.0};
  traj.ledger.D_visc = {0.0};
  traj.ledger.D_beta = {0.0};
  traj.ledger.S = {0.0};
  traj.ledger.C = {0.0};
  return traj;
}

}  // namespace

TEST_CASE("free energy values") {
  ProblemSpec s = make_preset("quartic-zero");
  const int n = s.grid.N;
  // u == r0 = 0: only psi(0) = 1/4 contributes besides the vanishing lambda
  // term
  CHECK(free_energy(s, Eigen::ArrayXd::Zero(n)) ==
        doctest::Approx(0.25 * s.grid.L).epsilon(1e-12));
  ProblemSpec nl = s;
  nl.lambda = 0.0;
  CHECK(free_energy(nl, Eigen::ArrayXd::Constant(n, 1.0)) ==
        doctest::Approx(0.0));
  // linear ramp: the delta term carries the exact discrete seminorm
  Eigen::ArrayXd ramp(n);
  const double slope = 0.8;
  for (int i = 0; i < n; ++i)
    ramp[i] = slope * (s.grid.cell_center(i) - 0.5);
  ProblemSpec sd = s;
  sd.lambda = 0.0;
  sd.delta = 2.0;
  const double grad2 = slope * slope * (s.grid.L - s.grid.h);
  const double psi_part =
      free_energy([&] { ProblemSpec t = sd; t.delta = 0.0; return t; }(),
                  ramp);
  CHECK(free_energy(sd, ramp) ==
        doctest::Approx(psi_part + 0.5 * sd.delta * grad2).epsilon(1e-12));
  CHECK_THROWS_AS(
      free_energy(make_preset("logwell-sign"),
                  Eigen::ArrayXd::Constant(n, 1.0)),
      DomainEscape);
}

TEST_CASE("energy ledger on solves") {
  // stationary: nothing moves
  {
    const Trajectory traj = solve(make_preset("stationary"));
    CHECK(energy_inequality_check(traj) <= 1e-12);
  }
  for (const char* name : {"quartic-zero", "quartic-power", "logwell-sign"}) {
    ProblemSpec s = make_preset(name);
    s.T = 0.02;  // short run for the unit suite; presets run in acceptance
    const Trajectory traj = solve(s);
    CHECK(energy_inequality_check(traj) <=
          1e-8 * std::max(1.0, traj.ledger.F0));
    for (double db : traj.ledger.D_beta) CHECK(db >= -1e-14);
    for (double dg : traj.ledger.D_grad) CHECK(dg >= 0.0);
    for (double c : traj.ledger.C) CHECK(c >= 0.0);
  }
}

TEST_CASE("max principle thresholds: logarithmic") {
  ProblemSpec s = make_preset("logwell-sign");
  // synthetic trajectory with sup |mu - g| = 2
  const Trajectory traj = synthetic_constant_mu(s, 2.0);
  const BoundReport rep = max_principle_report(s, traj);
  CHECK(rep.M == doctest::Approx(2.0));
  // b_bar solves (1/2) ln((1+r)/(1-r)) - 2r = 3 inside (0.99, 1)
  const double oracle = threshold_oracle(s.potential, 3.0, 0.9, 1.0 - 1e-15);
  CHECK(rep.b_bar == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(rep.a_bar == doctest::Approx(-oracle).epsilon(1e-9));
  CHECK(rep.b_bar > 0.99);
  CHECK(rep.b_bar < 1.0);
  // finite endpoints: enlargement halves the remaining gap
  CHECK(rep.b0_prime ==
        doctest::Approx(rep.b_bar + (1.0 - rep.b_bar) / 2.0).epsilon(1e-12));
  CHECK(rep.a0_prime ==
        doctest::Approx(rep.a_bar - (rep.a_bar + 1.0) / 2.0).epsilon(1e-12));
  CHECK(rep.pass);
}

TEST_CASE("max principle thresholds: double well") {
  ProblemSpec s = make_preset("quartic-zero");
  const Trajectory traj = synthetic_constant_mu(s, 1.5);
  const BoundReport rep = max_principle_report(s, traj);
  // b_bar is the real root of r^3 - r = M + 1 above 1
  const double oracle = threshold_oracle(s.potential, rep.M + 1.0, 1.0, 10.0);
  CHECK(rep.b_bar == doctest::Approx(oracle).epsilon(1e-9));
  // infinite endpoints: fixed enlargement by 1
  CHECK(rep.b0_prime == doctest::Approx(rep.b_bar + 1.0));
  CHECK(rep.a0_prime == doctest::Approx(rep.a_bar - 1.0));
  CHECK(rep.pass);
}

TEST_CASE("max principle on a converged run") {
  ProblemSpec s = make_preset("logwell-sign");
  s.T = 0.02;
  const Trajectory traj = solve(s);
  const BoundReport rep = max_principle_report(s, traj);
  CHECK(rep.pass);
  CHECK(rep.u_min > -1.0);
  CHECK(rep.u_max < 1.0);
  CHECK(rep.a0_prime <= rep.a_bar);
  CHECK(rep.a_bar <= rep.b_bar);
  CHECK(rep.b_bar <= rep.b0_prime);
}

TEST_CASE("flux identity") {
  ProblemSpec s = make_preset("quartic-power");
  s.T = 0.02;
  Trajectory traj = solve(s);
  CHECK(flux_identity_check(traj) <= 1e-12);
  // stationary: identically zero up to roundoff
  CHECK(flux_identity_check(solve(make_preset("stationary"))) <= 1e-13);
  // perturbing a boundary mu cell breaks the identity linearly
  Trajectory pert1 = traj, pert2 = traj;
  pert1.states[5].mu[0] += 1e-3;
  pert2.states[5].mu[0] += 2e-3;
  const double v1 = flux_identity_check(pert1);
  const double v2 = flux_identity_check(pert2);
  CHECK(v1 > 1e-6);
  CHECK(v2 == doctest::Approx(2.0 * v1).epsilon(1e-3));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dnch/presets.hpp"
#include "dnch/stepper.hpp"

using namespace dnch;

namespace {

ProblemSpec small_quartic(double tau = 1e-3, double T = 0.02, int N = 32) {
  ProblemSpec s = make_preset("quartic-zero");
  s.grid = Grid1D::make(1.0, N);
  s.tau = tau;
  s.T = T;
  s.u0 = cosine_profile(s.grid, 0.9);
  return s;
}

// Independent per-step solver: Newton in the u variable with a
// finite-difference Jacobian, no shared assembly with the library path.
Eigen::ArrayXd fd_newton_oracle(const ProblemSpec& s,
                                const Eigen::ArrayXd& u_prev,
                                const Eigen::ArrayXd& g_k) {
  const int n = s.grid.N;
  auto mu_of = [&](const Eigen::ArrayXd& u) {
    Eigen::ArrayXd w = (u - u_prev) / s.tau;
    Eigen::ArrayXd mu(n);
    for (int i = 0; i < n; ++i) {
      const double res = gamma_resolvent(s.potential, s.lambda, u[i]);
      mu[i] = s.eps * w[i] + yosida(s.graph, s.lambda, w[i]) +
              s.lambda * u[i] + gamma_yosida(s.potential, s.lambda, u[i]) -
              s.potential.K * truncation(s.lambda, res) + g_k[i];
    }
    return (mu - s.delta * lap_neumann(s.grid, u)).eval();
  };
  auto residual = [&](const Eigen::ArrayXd& u) {
    return (u - u_prev - s.tau * lap_dirichlet(s.grid, mu_of(u))).eval();
  };
  Eigen::ArrayXd u = u_prev;
  for (int it = 0; it < 80; ++it) {
    const Eigen::ArrayXd r = residual(u);
    if (r.abs().maxCoeff() < 1e-13) break;
    Eigen::MatrixXd J(n, n);
    const double fd = 1e-7;
    for (int j = 0; j < n; ++j) {
      Eigen::ArrayXd up = u;
      up[j] += fd;
      J.col(j) = ((residual(up) - r) / fd).matrix();
    }
    u -= J.partialPivLu().solve(r.matrix()).array();
  }
  return u;
}

}  // namespace

TEST_CASE("step_residual at stationary points") {
  ProblemSpec s = make_preset("stationary");
  s.lambda = 1e-6;
  const Eigen::ArrayXd zero = Eigen::ArrayXd::Zero(s.grid.N);
  const Eigen::ArrayXd ones = Eigen::ArrayXd::Constant(s.grid.N, 1.0);

  // u_prev at the well bottom r* = 1: the regularized chain leaves an O(lambda)
  // chemical potential
  const StepResidual sr = step_residual(s, ones, zero, zero);
  CHECK(sr.mu.abs().maxCoeff() <= 2e-6);
  CHECK((sr.r1 + lap_dirichlet(s.grid, sr.mu)).abs().maxCoeff() == 0.0);
  CHECK(sr.r2.abs().maxCoeff() == 0.0);

  // at the gamma-root r0 = 0 everything vanishes identically
  ProblemSpec q = small_quartic();
  const Eigen::ArrayXd z32 = Eigen::ArrayXd::Zero(q.grid.N);
  const StepResidual sr0 = step_residual(q, z32, z32, z32);
  CHECK(sr0.mu.abs().maxCoeff() == 0.0);
  CHECK(sr0.r1.abs().maxCoeff() == 0.0);
}

TEST_CASE("step_residual rejects escaped states") {
  ProblemSpec s = make_preset("logwell-sign");
  const Eigen::ArrayXd bad = Eigen::ArrayXd::Constant(s.grid.N, 1.5);
  const Eigen::ArrayXd zero = Eigen::ArrayXd::Zero(s.grid.N);
  CHECK_THROWS_AS(step_residual(s, bad, zero, zero), DomainEscape);
}

TEST_CASE("newton step: stationary seed") {
  const ProblemSpec s = make_preset("stationary");
  const Eigen::ArrayXd ones = Eigen::ArrayXd::Constant(s.grid.N, 1.0);
  const Eigen::ArrayXd zero = Eigen::ArrayXd::Zero(s.grid.N);
  const StepState st = newton_step_solve(s, ones, zero, zero);
  CHECK(st.w.abs().maxCoeff() <= 1e-8);
  CHECK(st.newton_iters <= 3);
}

TEST_CASE("newton step matches finite-difference oracle") {
  ProblemSpec s = small_quartic();
  s.delta = 0.0;
  s.eps = 1.0;
  s.graph = GraphSpec::zero();
  const Eigen::ArrayXd u_prev = cosine_profile(s.grid, 0.5);
  const Eigen::ArrayXd g_k = Eigen::ArrayXd::Zero(s.grid.N);
  const StepState st = newton_step_solve(s, u_prev, g_k, g_k);
  const Eigen::ArrayXd u_oracle = fd_newton_oracle(s, u_prev, g_k);
  CHECK((st.u - u_oracle).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("newton step: vanished viscosity with sign graph") {
  ProblemSpec s = make_preset("logwell-sign");
  s.eps = 0.0;
  s.delta = 1.0;
  s.lambda = 1e-4;
  const Eigen::ArrayXd u_prev = cosine_profile(s.grid, 0.5);
  const Eigen::ArrayXd g_k = Eigen::ArrayXd::Zero(s.grid.N);
  const StepState st = newton_step_solve(s, u_prev, g_k, g_k);
  CHECK(st.residual <= st.tolerance);
  CHECK(st.residual <= 1e-8);
  CHECK(st.xi.maxCoeff() <= 1.0 + 1e-6);
  CHECK(st.xi.minCoeff() >= -1.0 - 1e-6);
}

TEST_CASE("solve: per-step contracts") {
  const ProblemSpec s = small_quartic(1e-3, 0.02);
  const Trajectory traj = solve(s);
  REQUIRE(static_cast<int>(traj.states.size()) == s.steps());
  Eigen::ArrayXd u_prev = s.u0;
  for (const StepState& st : traj.states) {
    // exact reconstruction u^k = u^{k-1} + tau w^k
    CHECK((st.u - (u_prev + s.tau * st.w)).abs().maxCoeff() == 0.0);
    // discrete equation 1
    CHECK((st.w - lap_dirichlet(s.grid, st.mu)).abs().maxCoeff() <=
          1e-10);
    // selection consistency
    for (int i = 0; i < s.grid.N; ++i)
      CHECK(std::abs(st.xi[i] - yosida(s.graph, s.lambda, st.w[i])) <= 1e-12);
    // mass-flux identity (difference-first evaluation; mass is not conserved)
    const auto [fl, fr] = boundary_flux(s.grid, st.mu);
    const double rate = s.grid.h * (st.u - u_prev).sum() / s.tau;
    CHECK(std::abs(rate - (fr - fl)) <=
          1e-12 * std::max(1.0, norm_sup(st.mu)));
    u_prev = st.u;
  }
}

TEST_CASE("solve: stationary trajectory") {
  const ProblemSpec s = make_preset("stationary");
  const Trajectory traj = solve(s);
  for (const StepState& st : traj.states)
    CHECK(st.w.abs().maxCoeff() <= 1e-8);
}

TEST_CASE("warm-start invariance") {
  const ProblemSpec s = small_quartic(1e-3, 0.01);
  const Trajectory warm = solve(s);
  Eigen::ArrayXd u_prev = s.u0;
  const Eigen::ArrayXd zero = Eigen::ArrayXd::Zero(s.grid.N);
  for (int k = 1; k <= s.steps(); ++k) {
    const StepState st = newton_step_solve(s, u_prev, s.forcing_at(k * s.tau),
                                           zero);
    CHECK((st.u - warm.states[k - 1].u).abs().maxCoeff() <= 1e-9);
    u_prev = st.u;
  }
}

TEST_CASE("lambda-Cauchy differences shrink") {
  std::vector<Trajectory> runs;
  for (double lam : {1e-3, 1e-4, 1e-5}) {
    ProblemSpec s = small_quartic(1e-3, 0.02);
    s.lambda = lam;
    runs.push_back(solve(s));
  }
  const double d1 = difference_norm(runs[0], runs[1], SpaceTimeNorm::L2H);
  const double d2 = difference_norm(runs[1], runs[2], SpaceTimeNorm::L2H);
  CHECK(d2 <= d1 + 1e-14);
}

TEST_CASE("self-convergence in tau") {
  std::vector<Eigen::ArrayXd> finals;
  for (double tau : {4e-3, 2e-3, 1e-3}) {
    ProblemSpec s = make_preset("quartic-zero");
    s.tau = tau;
    finals.push_back(solve(s).states.back().u);
  }
  const Grid1D g = make_preset("quartic-zero").grid;
  const double d1 = norm_l2(g, finals[0] - finals[1]);
  const double d2 = norm_l2(g, finals[1] - finals[2]);
  CHECK(std::log2(d1 / d2) >= 0.9);
}

TEST_CASE("initial rates") {
  // zero data: u0 at the well bottom, no forcing
  {
    ProblemSpec s = make_preset("stationary");
    s.delta = 1.0;
    const InitialRates ir = initial_rates(s);
    CHECK(ir.w0.abs().maxCoeff() <= 1e-10);
    CHECK(ir.mu0.abs().maxCoeff() <= 1e-10);
    CHECK(ir.xi0.abs().maxCoeff() <= 1e-10);
  }
  // beta = zero: reduces to a linear solve, compare to a direct oracle
  {
    ProblemSpec s = small_quartic();
    s.graph = GraphSpec::zero();
    const int n = s.grid.N;
    const InitialRates ir = initial_rates(s);
    Eigen::ArrayXd z0 = -s.delta * lap_neumann(s.grid, s.u0);
    for (int i = 0; i < n; ++i) z0[i] += psi_prime(s.potential, s.u0[i]);
    const Eigen::MatrixXd LD = lap_dirichlet_matrix(s.grid);
    const Eigen::MatrixXd A =
        Eigen::MatrixXd::Identity(n, n) - s.eps * LD;
    const Eigen::ArrayXd w_oracle =
        A.partialPivLu().solve((LD * z0.matrix()).eval()).array();
    CHECK((ir.w0 - w_oracle).abs().maxCoeff() <= 1e-9);
    CHECK((ir.mu0 - (s.eps * ir.w0 + z0)).abs().maxCoeff() <= 1e-9);
  }
  // sign graph with small data: dead zone forces w0 ~ 0, xi0 = mu0 - z0
  {
    ProblemSpec s = make_preset("logwell-sign");
    s.delta = 0.1;  // keeps |z0| inside the dead zone of the sign graph
    s.u0 = cosine_profile(s.grid, 0.3);
    s.a0 = -0.3;
    s.b0 = 0.3;
    const InitialRates ir = initial_rates(s);
    Eigen::ArrayXd z0 = -s.delta * lap_neumann(s.grid, s.u0);
    for (int i = 0; i < s.grid.N; ++i)
      z0[i] += psi_prime(s.potential, s.u0[i]);
    REQUIRE(norm_sup(z0) < 1.0);
    CHECK(ir.w0.abs().maxCoeff() <= 10.0 * s.lambda);
    CHECK((ir.xi0 - (ir.mu0 - z0 - s.eps * ir.w0)).abs().maxCoeff() <= 1e-9);
    CHECK(ir.xi0.abs().maxCoeff() <= 1.0 + 1e-9);
  }
}

TEST_CASE("spec validation") {
  ProblemSpec s = make_preset("quartic-zero");
  s.eps = 0.0;
  s.delta = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  ProblemSpec t = make_preset("quartic-zero");
  t.T = 0.0105;  // not an integer multiple of tau
  CHECK_THROWS_AS(t.validate(), ConfigError);
  ProblemSpec r = make_preset("logwell-sign");
  r.b0 = 1.5;  // initial bound escapes the potential domain
  CHECK_THROWS_AS(r.validate(), ConfigError);
}

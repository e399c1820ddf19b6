#include "dnch/stepper.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "dnch/diagnostics.hpp"

namespace dnch {

namespace {

constexpr int kNewtonMaxIters = 50;
constexpr int kLineSearchMax = 30;
constexpr int kFallbackMaxIters = 500;
constexpr double kFallbackRelax = 0.5;

double newton_tolerance(const Eigen::ArrayXd& g_k) {
  return 1e-10 * (1.0 + norm_sup(g_k));
}

// The flux identity checks ride on how small the converged residual is, so
// keep iterating below the acceptance tolerance while progress lasts.
double newton_target(const Eigen::ArrayXd& g_k) {
  return 1e-13 * (1.0 + norm_sup(g_k));
}

// mu and r1 assembled entrywise from the lambda-regularized catalogue; no
// domain check (the regularized scalar maps are globally defined). The two
// chained stencils amplify unit roundoff by 16*delta/h^4, which at N >= 64
// would swamp the per-step tolerance, so the stencil arithmetic runs in
// extended precision and is rounded once at the end.
struct Assembled {
  Eigen::ArrayXd mu;
  Eigen::ArrayXd r1;
  double scale = 0.0;  // sup over cells of the summed term magnitudes in mu
};

Assembled assemble_step(const ProblemSpec& spec, const Eigen::ArrayXd& u_prev,
                        const Eigen::ArrayXd& w, const Eigen::ArrayXd& g_k) {
  const auto& P = spec.potential;
  const double lam = spec.lambda;
  const int n = spec.grid.N;
  const long double ih2 = 1.0L / ((long double)spec.grid.h * spec.grid.h);

  std::vector<long double> u(n), mu(n);
  for (int i = 0; i < n; ++i)
    u[i] = (long double)u_prev[i] + (long double)spec.tau * w[i];
  Assembled out;
  for (int i = 0; i < n; ++i) {
    const double ud = static_cast<double>(u[i]);
    const double s = gamma_resolvent(P, lam, ud);
    const long double um = (i == 0) ? u[0] : u[i - 1];        // mirror ghosts
    const long double up = (i == n - 1) ? u[n - 1] : u[i + 1];
    const long double lap_u = ((um + up) - 2.0L * u[i]) * ih2;
    const long double terms[] = {(long double)spec.eps * w[i],
                                 (long double)yosida(spec.graph, lam, w[i]),
                                 -(long double)spec.delta * lap_u,
                                 (long double)lam * u[i],
                                 (long double)gamma_eval(P, s),
                                 -(long double)P.K * truncation(lam, s),
                                 (long double)g_k[i]};
    long double sum = 0.0L, mag = 0.0L;
    for (long double t : terms) {
      sum += t;
      mag += std::abs(t);
    }
    mu[i] = sum;
    out.scale = std::max(out.scale, static_cast<double>(mag));
  }
  out.mu.resize(n);
  out.r1.resize(n);
  for (int i = 0; i < n; ++i) {
    const long double mm = (i == 0) ? -mu[0] : mu[i - 1];  // antisym ghosts
    const long double mp = (i == n - 1) ? -mu[n - 1] : mu[i + 1];
    const long double lap_mu = ((mm + mp) - 2.0L * mu[i]) * ih2;
    out.mu[i] = static_cast<double>(mu[i]);
    out.r1[i] = static_cast<double>((long double)w[i] - lap_mu);
  }
  return out;
}

bool inside_domain(const PotentialSpec& P, const Eigen::ArrayXd& u) {
  return (u > P.a).all() && (u < P.b).all();
}

struct StepWorkspace {
  Eigen::MatrixXd lapD;
  Eigen::MatrixXd lapN;
};

// Jacobian of r1(w) = w - lap_dirichlet(mu(w)), with
// d mu / d w = diag(eps + beta_lambda'(w))
//            + tau * (-delta * lapN + diag(lambda + gamma_lambda'(u)
//                                          - K * (T_lambda o R_gamma)'(u))).
Eigen::MatrixXd step_jacobian(const ProblemSpec& spec, const StepWorkspace& ws,
                              const Eigen::ArrayXd& u,
                              const Eigen::ArrayXd& w) {
  const int n = spec.grid.N;
  const double lam = spec.lambda;
  Eigen::VectorXd dvisc(n), dpot(n);
  for (int i = 0; i < n; ++i) {
    dvisc[i] = spec.eps + yosida_derivative(spec.graph, lam, w[i]);
    dpot[i] = lam + gamma_yosida_derivative(spec.potential, lam, u[i]) -
              spec.potential.K *
                  trunc_resolvent_derivative(spec.potential, lam, u[i]);
  }
  Eigen::MatrixXd dmu = (-spec.tau * spec.delta) * ws.lapN;
  dmu.diagonal() += dvisc + spec.tau * dpot;
  Eigen::MatrixXd J = -ws.lapD * dmu;
  J.diagonal().array() += 1.0;
  return J;
}

StepState newton_solve_impl(const ProblemSpec& spec, const StepWorkspace& ws,
                            const Eigen::ArrayXd& u_prev,
                            const Eigen::ArrayXd& g_k,
                            const Eigen::ArrayXd& w_init, int step_index) {
  const double target = newton_target(g_k);
  const double ih2 = 1.0 / (spec.grid.h * spec.grid.h);

  Eigen::ArrayXd w = w_init;
  Eigen::ArrayXd mu;
  double scale = 0.0;
  auto residual_of = [&](const Eigen::ArrayXd& wc, Eigen::ArrayXd& mu_out,
                         double& scale_out) -> Eigen::ArrayXd {
    Assembled a = assemble_step(spec, u_prev, wc, g_k);
    mu_out = std::move(a.mu);
    scale_out = a.scale;
    return std::move(a.r1);
  };
  // Roundoff floor of the computed residual: the Dirichlet stencil amplifies
  // the rounding noise of the assembled mu entries by 4/h^2, and the root w*
  // itself is only representable to ulp(|w|), which the residual Jacobian
  // (dominated by 16*tau*delta/h^4) turns into an irreducible residual.
  // Below this level the computed residual is noise.
  auto floor_of = [&](double s, double wsup) {
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    const double jnorm =
        spec.eps + spec.tau * (spec.lambda + 4.0 * spec.delta * ih2);
    return 32.0 * kEps * ih2 * ((1.0 + s) + jnorm * wsup);
  };

  Eigen::ArrayXd r = residual_of(w, mu, scale);
  double rnorm = norm_sup(r);
  double tol = std::max(newton_tolerance(g_k), floor_of(scale, norm_sup(w)));
  int iters = 0;

  auto try_direction = [&](const Eigen::ArrayXd& dw, double relax) -> bool {
    double alpha = relax;
    for (int ls = 0; ls < kLineSearchMax; ++ls) {
      Eigen::ArrayXd wc = w + alpha * dw;
      Eigen::ArrayXd muc;
      double scalec = 0.0;
      Eigen::ArrayXd rc = residual_of(wc, muc, scalec);
      const double rcnorm = norm_sup(rc);
      if (rcnorm < rnorm) {
        w = std::move(wc);
        mu = std::move(muc);
        r = std::move(rc);
        rnorm = rcnorm;
        scale = scalec;
        tol = std::max(newton_tolerance(g_k), floor_of(scale, norm_sup(w)));
        return true;
      }
      alpha *= 0.5;
    }
    return false;
  };

  // Phase 1: damped Newton.
  bool stagnated = false;
  for (; iters < kNewtonMaxIters && rnorm > target; ++iters) {
    const Eigen::ArrayXd u = u_prev + spec.tau * w;
    const Eigen::MatrixXd J = step_jacobian(spec, ws, u, w);
    const Eigen::VectorXd dw = J.partialPivLu().solve(-r.matrix());
    if (!dw.allFinite() || !try_direction(dw.array(), 1.0)) {
      stagnated = true;
      break;
    }
  }

  // Phase 2: relaxed sweep on the Newton map if phase 1 stalled above the
  // acceptance tolerance.
  if (stagnated && rnorm > tol) {
    for (int it = 0; it < kFallbackMaxIters && rnorm > tol; ++it, ++iters) {
      const Eigen::ArrayXd u = u_prev + spec.tau * w;
      const Eigen::MatrixXd J = step_jacobian(spec, ws, u, w);
      const Eigen::VectorXd dw = J.partialPivLu().solve(-r.matrix());
      if (!dw.allFinite() || !try_direction(dw.array(), kFallbackRelax)) break;
    }
  }

  if (rnorm > tol)
    throw NonConvergence("newton_step_solve failed", step_index, rnorm);

  const Eigen::ArrayXd u = u_prev + spec.tau * w;
  if (!inside_domain(spec.potential, u))
    throw DomainEscape("converged iterate left the potential domain");

  StepState st;
  st.u = u;
  st.mu = mu;
  st.w = w;
  st.xi = Eigen::ArrayXd(w.size());
  for (int i = 0; i < w.size(); ++i)
    st.xi[i] = yosida(spec.graph, spec.lambda, w[i]);
  st.newton_iters = iters;
  st.residual = rnorm;
  st.tolerance = tol;
  return st;
}

}  // namespace

int ProblemSpec::steps() const {
  return static_cast<int>(std::llround(T / tau));
}

Eigen::ArrayXd ProblemSpec::forcing_at(double t) const {
  if (!forcing) return Eigen::ArrayXd::Zero(grid.N);
  Eigen::ArrayXd g = forcing(grid, t);
  assert(g.size() == grid.N);
  return g;
}

void ProblemSpec::validate() const {
  if (eps < 0.0 || delta < 0.0)
    throw ConfigError("eps and delta must be nonnegative");
  if (eps == 0.0 && delta == 0.0)
    throw ConfigError(
        "at least one regularization must be active: eps and delta cannot "
        "both vanish");
  if (lambda <= 0.0) throw ConfigError("lambda must be positive");
  if (tau <= 0.0 || T <= 0.0) throw ConfigError("tau and T must be positive");
  const double k = T / tau;
  if (std::abs(k - std::llround(k)) > 1e-9 * std::max(1.0, k))
    throw ConfigError("T must be an integer multiple of tau");
  if (grid.N < 4) throw ConfigError("grid must have at least 4 cells");
  if (u0.size() != grid.N) throw ConfigError("u0 size does not match grid");
  if (!(a0 <= b0) || !(a0 > potential.a) || !(b0 < potential.b))
    throw ConfigError("[a0, b0] must be a closed subinterval of (a, b)");
  if ((u0 < a0).any() || (u0 > b0).any())
    throw ConfigError("u0 must take values in [a0, b0]");
}

StepResidual step_residual(const ProblemSpec& spec,
                           const Eigen::ArrayXd& u_prev,
                           const Eigen::ArrayXd& w,
                           const Eigen::ArrayXd& g_k) {
  assert(u_prev.size() == spec.grid.N && w.size() == spec.grid.N &&
         g_k.size() == spec.grid.N);
  const Eigen::ArrayXd u = u_prev + spec.tau * w;
  if (!inside_domain(spec.potential, u))
    throw DomainEscape("step_residual: u left (a, b) during assembly");
  StepResidual out;
  Assembled a = assemble_step(spec, u_prev, w, g_k);
  out.mu = std::move(a.mu);
  out.r1 = std::move(a.r1);
  out.r2 = Eigen::ArrayXd::Zero(w.size());
  return out;
}

StepState newton_step_solve(const ProblemSpec& spec,
                            const Eigen::ArrayXd& u_prev,
                            const Eigen::ArrayXd& g_k,
                            const Eigen::ArrayXd& w_init) {
  StepWorkspace ws{lap_dirichlet_matrix(spec.grid),
                   lap_neumann_matrix(spec.grid)};
  return newton_solve_impl(spec, ws, u_prev, g_k, w_init, 0);
}

Trajectory solve(const ProblemSpec& spec) {
  spec.validate();
  const int M = spec.steps();
  StepWorkspace ws{lap_dirichlet_matrix(spec.grid),
                   lap_neumann_matrix(spec.grid)};

  Trajectory traj;
  traj.spec = spec;
  traj.states.reserve(M);
  traj.ledger.F0 = free_energy(spec, spec.u0);

  Eigen::ArrayXd u = spec.u0;
  Eigen::ArrayXd w = Eigen::ArrayXd::Zero(spec.grid.N);
  for (int k = 1; k <= M; ++k) {
    const double t = k * spec.tau;
    const Eigen::ArrayXd g_k = spec.forcing_at(t);
    StepState st = newton_solve_impl(spec, ws, u, g_k, w, k);
    st.k = k;
    st.t = t;

    EnergyLedger& led = traj.ledger;
    const Grid1D& gr = spec.grid;
    const double tau = spec.tau;
    led.F.push_back(free_energy(spec, st.u));
    const double gmu = h1_seminorm(gr, st.mu, Bc::Dirichlet);
    led.D_grad.push_back(tau * gmu * gmu);
    const double nw = norm_l2(gr, st.w);
    led.D_visc.push_back(tau * spec.eps * nw * nw);
    led.D_beta.push_back(tau * gr.h * (st.xi * st.w).sum());
    led.S.push_back(-tau * gr.h * (g_k * st.w).sum());
    const double du = norm_l2(gr, (st.u - u).eval());
    led.C.push_back(0.5 * spec.potential.K * du * du);

    u = st.u;
    w = st.w;
    traj.states.push_back(std::move(st));
  }
  return traj;
}

InitialRates initial_rates(const ProblemSpec& spec) {
  if (!(spec.eps > 0.0))
    throw ConfigError("initial_rates requires eps > 0");
  const int n = spec.grid.N;
  const double lam = spec.lambda;
  Eigen::ArrayXd z0(n);
  {
    const Eigen::ArrayXd lap_u0 = lap_neumann(spec.grid, spec.u0);
    const Eigen::ArrayXd g0 = spec.forcing_at(0.0);
    for (int i = 0; i < n; ++i)
      z0[i] = -spec.delta * lap_u0[i] + psi_prime(spec.potential, spec.u0[i]) +
              g0[i];
  }
  const Eigen::MatrixXd lapD = lap_dirichlet_matrix(spec.grid);

  Eigen::ArrayXd w = Eigen::ArrayXd::Zero(n);
  auto mu_of = [&](const Eigen::ArrayXd& wc) {
    Eigen::ArrayXd mu(n);
    for (int i = 0; i < n; ++i)
      mu[i] = spec.eps * wc[i] + yosida(spec.graph, lam, wc[i]) + z0[i];
    return mu;
  };
  Eigen::ArrayXd mu = mu_of(w);
  Eigen::ArrayXd r = w - lap_dirichlet(spec.grid, mu);
  double rnorm = norm_sup(r);
  const double ih2 = 1.0 / (spec.grid.h * spec.grid.h);
  const double tol =
      std::max(1e-10 * (1.0 + norm_sup(z0)),
               32.0 * std::numeric_limits<double>::epsilon() * ih2 *
                   (1.0 + norm_sup(z0)));

  for (int it = 0; it < kNewtonMaxIters + kFallbackMaxIters && rnorm > 1e-13;
       ++it) {
    Eigen::VectorXd diag(n);
    for (int i = 0; i < n; ++i)
      diag[i] = spec.eps + yosida_derivative(spec.graph, lam, w[i]);
    Eigen::MatrixXd J = -lapD * Eigen::MatrixXd(diag.asDiagonal());
    J.diagonal().array() += 1.0;
    const Eigen::VectorXd dw = J.partialPivLu().solve(-r.matrix());
    double alpha = 1.0;
    bool improved = false;
    for (int ls = 0; ls < kLineSearchMax; ++ls, alpha *= 0.5) {
      Eigen::ArrayXd wc = w + alpha * dw.array();
      Eigen::ArrayXd muc = mu_of(wc);
      Eigen::ArrayXd rc = wc - lap_dirichlet(spec.grid, muc);
      if (norm_sup(rc) < rnorm) {
        w = std::move(wc);
        mu = std::move(muc);
        r = std::move(rc);
        rnorm = norm_sup(r);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (rnorm > tol)
    throw NonConvergence("initial_rates failed", 0, rnorm);

  InitialRates out;
  out.w0 = w;
  out.mu0 = mu;
  out.xi0 = Eigen::ArrayXd(n);
  for (int i = 0; i < n; ++i) out.xi0[i] = yosida(spec.graph, lam, w[i]);
  return out;
}

namespace {

double field_norm(const Grid1D& g, const Eigen::ArrayXd& f, SpaceTimeNorm which) {
  switch (which) {
    case SpaceTimeNorm::L2V0:
      return h1_seminorm(g, f, Bc::Dirichlet);
    case SpaceTimeNorm::LinfV: {
      const double l2 = norm_l2(g, f);
      const double semi = h1_seminorm(g, f, Bc::Neumann);
      return std::sqrt(l2 * l2 + semi * semi);
    }
    default:
      return norm_l2(g, f);
  }
}

double spacetime_impl(const Grid1D& grid, double tau,
                      const std::vector<const StepState*>& a,
                      const std::vector<const StepState*>& b,
                      SpaceTimeNorm which) {
  // b empty: norms of a itself; otherwise norms of the difference a - b.
  const std::size_t M = a.size();
  auto udiff = [&](std::size_t k) -> Eigen::ArrayXd {
    return b.empty() ? a[k]->u : (a[k]->u - b[k]->u).eval();
  };
  auto wdiff = [&](std::size_t k) -> Eigen::ArrayXd {
    return b.empty() ? a[k]->w : (a[k]->w - b[k]->w).eval();
  };
  auto mudiff = [&](std::size_t k) -> Eigen::ArrayXd {
    return b.empty() ? a[k]->mu : (a[k]->mu - b[k]->mu).eval();
  };
  switch (which) {
    case SpaceTimeNorm::L2V0: {
      double acc = 0.0;
      for (std::size_t k = 0; k < M; ++k) {
        const double v = field_norm(grid, mudiff(k), which);
        acc += tau * v * v;
      }
      return std::sqrt(acc);
    }
    case SpaceTimeNorm::H1H: {
      double acc = 0.0;
      for (std::size_t k = 0; k < M; ++k) {
        const double nu = norm_l2(grid, udiff(k));
        const double nw = norm_l2(grid, wdiff(k));
        acc += tau * (nu * nu + nw * nw);
      }
      return std::sqrt(acc);
    }
    case SpaceTimeNorm::L2H: {
      double acc = 0.0;
      for (std::size_t k = 0; k < M; ++k) {
        const double nu = norm_l2(grid, udiff(k));
        acc += tau * nu * nu;
      }
      return std::sqrt(acc);
    }
    case SpaceTimeNorm::LinfH:
    case SpaceTimeNorm::LinfV: {
      double best = 0.0;
      for (std::size_t k = 0; k < M; ++k)
        best = std::max(best, field_norm(grid, udiff(k), which));
      return best;
    }
  }
  return 0.0;
}

std::vector<const StepState*> state_ptrs(const Trajectory& t) {
  std::vector<const StepState*> out;
  out.reserve(t.states.size());
  for (const auto& s : t.states) out.push_back(&s);
  return out;
}

}  // namespace

double spacetime_norms(const Trajectory& traj, SpaceTimeNorm which) {
  return spacetime_impl(traj.spec.grid, traj.spec.tau, state_ptrs(traj), {},
                        which);
}

double difference_norm(const Trajectory& a, const Trajectory& b,
                       SpaceTimeNorm which) {
  if (a.states.size() != b.states.size() || a.spec.grid.N != b.spec.grid.N)
    throw ConfigError("difference_norm: mismatched trajectories");
  return spacetime_impl(a.spec.grid, a.spec.tau, state_ptrs(a), state_ptrs(b),
                        which);
}

}  // namespace dnch

#include "dnch/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace dnch {

double free_energy(const ProblemSpec& spec, const Eigen::ArrayXd& u) {
  const Grid1D& g = spec.grid;
  double bulk = 0.0;
  for (int i = 0; i < u.size(); ++i) bulk += psi_eval(spec.potential, u[i]);
  bulk *= g.h;
  const double semi = h1_seminorm(g, u, Bc::Neumann);
  const double l2 = norm_l2(g, u);
  return bulk + 0.5 * spec.delta * semi * semi + 0.5 * spec.lambda * l2 * l2;
}

double energy_inequality_check(const Trajectory& traj) {
  const EnergyLedger& led = traj.ledger;
  double worst = 0.0;
  double F_prev = led.F0;
  for (std::size_t k = 0; k < led.F.size(); ++k) {
    const double viol = led.F[k] - F_prev + led.D_grad[k] + led.D_visc[k] +
                        led.D_beta[k] - led.S[k] - led.C[k];
    worst = std::max(worst, viol);
    F_prev = led.F[k];
  }
  return worst;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// least r >= from with psi'(r) >= level, searching toward the endpoint b.
// Returns false when psi' never reaches the level (bounded derivative).
bool find_upper_threshold(const PotentialSpec& P, double from, double level,
                          double* out) {
  auto val = [&](double r) { return psi_prime(P, r); };
  if (val(from) >= level) {
    *out = from;
    return true;
  }
  double hi;
  if (std::isinf(P.b)) {
    hi = std::max(std::abs(from), 1.0);
    int it = 0;
    while (val(hi) < level && ++it < 200) hi *= 2.0;
    if (val(hi) < level) return false;
  } else {
    // approach the singular endpoint geometrically
    double gap = P.b - from;
    hi = P.b - 0.5 * gap;
    int it = 0;
    while (val(hi) < level && ++it < 200) {
      gap *= 0.5;
      hi = P.b - 0.5 * gap;
    }
    if (val(hi) < level) return false;
  }
  double lo = from;
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (val(mid) >= level)
      hi = mid;
    else
      lo = mid;
  }
  *out = hi;
  return true;
}

bool find_lower_threshold(const PotentialSpec& P, double from, double level,
                          double* out) {
  // greatest r <= from with psi'(r) <= -level, toward the endpoint a.
  auto val = [&](double r) { return psi_prime(P, r); };
  if (val(from) <= -level) {
    *out = from;
    return true;
  }
  double lo;
  if (std::isinf(P.a)) {
    lo = -std::max(std::abs(from), 1.0);
    int it = 0;
    while (val(lo) > -level && ++it < 200) lo *= 2.0;
    if (val(lo) > -level) return false;
  } else {
    double gap = from - P.a;
    lo = P.a + 0.5 * gap;
    int it = 0;
    while (val(lo) > -level && ++it < 200) {
      gap *= 0.5;
      lo = P.a + 0.5 * gap;
    }
    if (val(lo) > -level) return false;
  }
  double hi = from;
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (val(mid) <= -level)
      lo = mid;
    else
      hi = mid;
  }
  *out = lo;
  return true;
}

}  // namespace

BoundReport max_principle_report(const ProblemSpec& spec,
                                 const Trajectory& traj) {
  BoundReport rep;
  for (const StepState& st : traj.states) {
    const Eigen::ArrayXd g_k = spec.forcing_at(st.t);
    rep.M = std::max(rep.M, norm_sup((st.mu - g_k).eval()));
  }
  rep.u_min = spec.u0.minCoeff();
  rep.u_max = spec.u0.maxCoeff();
  for (const StepState& st : traj.states) {
    rep.u_min = std::min(rep.u_min, st.u.minCoeff());
    rep.u_max = std::max(rep.u_max, st.u.maxCoeff());
  }

  const PotentialSpec& P = spec.potential;
  const double level = rep.M + 1.0;
  double b_bar, a_bar;
  const bool ok_hi = find_upper_threshold(P, spec.b0, level, &b_bar);
  const bool ok_lo = find_lower_threshold(P, spec.a0, level, &a_bar);
  if (!ok_hi || !ok_lo) {
    rep.threshold_found = false;
    rep.pass = false;
    rep.a_bar = rep.a0_prime = -kInf;
    rep.b_bar = rep.b0_prime = kInf;
    return rep;
  }
  rep.a_bar = a_bar;
  rep.b_bar = b_bar;
  rep.a0_prime = std::isinf(P.a) ? a_bar - 1.0 : a_bar - 0.5 * (a_bar - P.a);
  rep.b0_prime = std::isinf(P.b) ? b_bar + 1.0 : b_bar + 0.5 * (P.b - b_bar);
  rep.pass = rep.a0_prime <= rep.u_min && rep.u_max <= rep.b0_prime;
  return rep;
}

double flux_identity_check(const Trajectory& traj) {
  const Grid1D& g = traj.spec.grid;
  const double tau = traj.spec.tau;
  double worst = 0.0;
  const Eigen::ArrayXd* u_prev = &traj.spec.u0;
  for (const StepState& st : traj.states) {
    // h * sum (u^k - u^{k-1}) / tau == L * d(mean)/dt, written as a
    // difference field so near-cancelling sums stay at roundoff level.
    const double rate = g.h * (st.u - *u_prev).sum() / tau;
    const auto [left, right] = boundary_flux(g, st.mu);
    const double viol =
        std::abs(rate - (right - left)) / std::max(1.0, norm_sup(st.mu));
    worst = std::max(worst, viol);
    u_prev = &st.u;
  }
  return worst;
}

}  // namespace dnch

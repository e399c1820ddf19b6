#include "dnch/monotone.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace dnch {

namespace {

constexpr double kScalarTol = 1e-13;
constexpr int kMaxBisect = 200;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Monotone bisection for F(s) = s + lambda*beta(s) - r on [lo, hi],
// F(lo) <= 0 <= F(hi). Handles jump discontinuities of beta.
template <typename F>
double bisect(F&& f, double lo, double hi) {
  for (int i = 0; i < kMaxBisect && hi - lo > kScalarTol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double sgn(double r) { return (r > 0.0) - (r < 0.0); }

}  // namespace

// ---------------------------------------------------------------------------
// GraphSpec factories

GraphSpec GraphSpec::zero() { return GraphSpec{}; }

GraphSpec GraphSpec::sign() {
  GraphSpec g;
  g.kind = GraphKind::Sign;
  return g;
}

GraphSpec GraphSpec::power(double p, double coeff) {
  assert(p >= 1.0 && coeff > 0.0);
  GraphSpec g;
  g.kind = GraphKind::Power;
  g.power_p = p;
  g.power_coeff = coeff;
  return g;
}

GraphSpec GraphSpec::piecewise_linear(std::vector<double> breakpoints,
                                      std::vector<double> slopes) {
  assert(slopes.size() == breakpoints.size() + 1);
  assert(std::is_sorted(breakpoints.begin(), breakpoints.end()));
  for (double s : slopes) assert(s >= 0.0);
  GraphSpec g;
  g.kind = GraphKind::PiecewiseLinear;
  g.breakpoints = std::move(breakpoints);
  g.slopes = std::move(slopes);
  return g;
}

// ---------------------------------------------------------------------------
// beta and beta_hat

namespace {

// Segment index of the piecewise-linear graph containing r; breakpoints are
// the segment boundaries, segment i lives left of breakpoints[i].
std::size_t pl_segment(const GraphSpec& g, double r) {
  std::size_t i = 0;
  while (i < g.breakpoints.size() && r >= g.breakpoints[i]) ++i;
  return i;
}

double pl_eval(const GraphSpec& g, double r) {
  // Walk from 0 (beta(0) = 0) to r, accumulating slope * run.
  double val = 0.0;
  if (r >= 0.0) {
    double x = 0.0;
    std::size_t i = pl_segment(g, 0.0);
    while (x < r) {
      const double seg_end =
          (i < g.breakpoints.size()) ? g.breakpoints[i] : kInf;
      const double stop = std::min(r, seg_end);
      if (stop > x) val += g.slopes[i] * (stop - x);
      x = stop;
      ++i;
    }
  } else {
    double x = 0.0;
    std::size_t i = pl_segment(g, 0.0);
    while (x > r) {
      const double seg_start = (i > 0) ? g.breakpoints[i - 1] : -kInf;
      const double stop = std::max(r, seg_start);
      if (stop < x) val -= g.slopes[i] * (x - stop);
      x = stop;
      if (i > 0) --i;
    }
  }
  return val;
}

}  // namespace

double beta_eval(const GraphSpec& g, double r) {
  switch (g.kind) {
    case GraphKind::Zero:
      return 0.0;
    case GraphKind::Sign:
      return sgn(r);
    case GraphKind::Power:
      return g.power_coeff * sgn(r) * std::pow(std::abs(r), g.power_p);
    case GraphKind::PiecewiseLinear:
      return pl_eval(g, r);
  }
  return 0.0;
}

double beta_hat(const GraphSpec& g, double r) {
  switch (g.kind) {
    case GraphKind::Zero:
      return 0.0;
    case GraphKind::Sign:
      return std::abs(r);
    case GraphKind::Power:
      return g.power_coeff * std::pow(std::abs(r), g.power_p + 1.0) /
             (g.power_p + 1.0);
    case GraphKind::PiecewiseLinear: {
      // Piecewise quadratic; integrate segment by segment from 0.
      const double dir = (r >= 0.0) ? 1.0 : -1.0;
      double val = 0.0;
      double x = 0.0;
      std::size_t i = pl_segment(g, 0.0);
      while (dir * (r - x) > 0.0) {
        double stop;
        if (dir > 0.0) {
          const double seg_end =
              (i < g.breakpoints.size()) ? g.breakpoints[i] : kInf;
          stop = std::min(r, seg_end);
        } else {
          const double seg_start = (i > 0) ? g.breakpoints[i - 1] : -kInf;
          stop = std::max(r, seg_start);
        }
        const double run = stop - x;
        val += pl_eval(g, x) * run + 0.5 * g.slopes[i] * run * run;
        x = stop;
        if (dir > 0.0)
          ++i;
        else if (i > 0)
          --i;
      }
      return val;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Resolvent / Yosida / Moreau

double resolvent(const GraphSpec& g, double lambda, double r) {
  assert(lambda > 0.0);
  switch (g.kind) {
    case GraphKind::Zero:
      return r;
    case GraphKind::Sign:
      // Soft threshold.
      return sgn(r) * std::max(std::abs(r) - lambda, 0.0);
    case GraphKind::Power: {
      if (g.power_p == 1.0) return r / (1.0 + lambda * g.power_coeff);
      // Odd, strictly increasing: bisect on the side of r, then polish with
      // Newton so the Yosida value (r - s)/lambda stays accurate for tiny
      // lambda.
      const double dir = sgn(r);
      if (dir == 0.0) return 0.0;
      auto f = [&](double x) { return x + lambda * beta_eval(g, x) - r; };
      double s = (dir > 0.0) ? bisect(f, 0.0, r) : bisect(f, r, 0.0);
      for (int it = 0; it < 4; ++it) {
        const double df = 1.0 + lambda * g.power_coeff * g.power_p *
                                    std::pow(std::abs(s), g.power_p - 1.0);
        const double snew = s - f(s) / df;
        // stay on the side of the origin
        if (dir * snew < 0.0) break;
        s = snew;
      }
      return s;
    }
    case GraphKind::PiecewiseLinear: {
      auto f = [&](double x) { return x + lambda * beta_eval(g, x) - r; };
      // s lies between 0 and r (resolvent is nonexpansive, fixes 0).
      double s = (r >= 0.0) ? bisect(f, 0.0, r) : bisect(f, r, 0.0);
      // Exact linear solve on the located segment.
      double snapped = s;
      for (double bp : g.breakpoints)
        if (std::abs(s - bp) <= 10.0 * kScalarTol) snapped = bp;
      const std::size_t seg = pl_segment(g, snapped);
      const double m = g.slopes[seg];
      const double x0 = snapped;
      const double b0 = pl_eval(g, x0);
      // s + lambda (b0 + m (s - x0)) = r on the segment
      double cand = (r - lambda * (b0 - m * x0)) / (1.0 + lambda * m);
      const double seg_lo = (seg > 0) ? g.breakpoints[seg - 1] : -kInf;
      const double seg_hi =
          (seg < g.breakpoints.size()) ? g.breakpoints[seg] : kInf;
      if (cand >= seg_lo && cand <= seg_hi) return cand;
      return s;
    }
  }
  return r;
}

double yosida(const GraphSpec& g, double lambda, double r) {
  switch (g.kind) {
    case GraphKind::Zero:
      return 0.0;
    case GraphKind::Sign:
      // (r - s)/lambda is exact here: s is a soft threshold, so the
      // difference is sgn(r)*lambda outside the dead zone and r inside.
      return (r - resolvent(g, lambda, r)) / lambda;
    case GraphKind::Power:
    case GraphKind::PiecewiseLinear:
      // Single-valued graphs: beta_lambda = beta o (I + lambda beta)^{-1}.
      // Evaluating beta at the resolvent avoids the catastrophic
      // (r - s)/lambda cancellation for small lambda and lands the value
      // exactly on the graph.
      return beta_eval(g, resolvent(g, lambda, r));
  }
  return 0.0;
}

double yosida_derivative(const GraphSpec& g, double lambda, double r) {
  assert(lambda > 0.0);
  // (1 - s'(r)) / lambda with s' the right-derivative of the resolvent.
  switch (g.kind) {
    case GraphKind::Zero:
      return 0.0;
    case GraphKind::Sign:
      // Resolvent flat on [-lambda, lambda), slope 1 elsewhere.
      return (r >= lambda || r < -lambda) ? 0.0 : 1.0 / lambda;
    case GraphKind::Power: {
      const double s = resolvent(g, lambda, r);
      const double bp = g.power_coeff * g.power_p *
                        std::pow(std::abs(s), g.power_p - 1.0);
      const double ds = 1.0 / (1.0 + lambda * bp);
      return (1.0 - ds) / lambda;
    }
    case GraphKind::PiecewiseLinear: {
      const double s = resolvent(g, lambda, r);
      // Right-slope at s; the bisection lands within kScalarTol of a kink,
      // so snap to the nearest breakpoint before picking the segment.
      double snapped = s;
      for (double bp : g.breakpoints)
        if (std::abs(s - bp) <= 10.0 * kScalarTol) snapped = bp;
      const double m = g.slopes[pl_segment(g, snapped)];
      const double ds = 1.0 / (1.0 + lambda * m);
      return (1.0 - ds) / lambda;
    }
  }
  return 0.0;
}

double moreau_envelope(const GraphSpec& g, double lambda, double r) {
  const double s = resolvent(g, lambda, r);
  const double y = (r - s) / lambda;
  return 0.5 * lambda * y * y + beta_hat(g, s);
}

double conjugate_eval(const GraphSpec& g, double s) {
  switch (g.kind) {
    case GraphKind::Zero:
      // Conjugate of the zero function: indicator of {0}.
      return (s == 0.0) ? 0.0 : kInf;
    case GraphKind::Sign:
      // tolerance absorbs roundoff in Yosida values that saturate at +-1
      return (std::abs(s) <= 1.0 + 1e-9) ? 0.0 : kInf;
    case GraphKind::Power: {
      // beta_hat = coeff |r|^{p+1}/(p+1); conjugate is the dual power.
      const double p = g.power_p;
      const double q = (p + 1.0) / p;
      return std::pow(g.power_coeff, -1.0 / p) * (p / (p + 1.0)) *
             std::pow(std::abs(s), q);
    }
    case GraphKind::PiecewiseLinear: {
      // Finite iff s lies in the closure of the range of beta. When an
      // outermost slope vanishes the range saturates at the value on that
      // flat tail, attained from the outermost breakpoint onward.
      const double left_end =
          g.breakpoints.empty() ? 0.0 : g.breakpoints.front();
      const double right_end =
          g.breakpoints.empty() ? 0.0 : g.breakpoints.back();
      const double range_lo =
          (g.slopes.front() > 0.0) ? -kInf : pl_eval(g, left_end);
      const double range_hi =
          (g.slopes.back() > 0.0) ? kInf : pl_eval(g, right_end);
      const double tol = 1e-9 * (1.0 + std::abs(s));
      if (s < range_lo - tol || s > range_hi + tol) return kInf;
      if (s <= range_lo + tol && !std::isinf(range_lo))
        return left_end * s - beta_hat(g, left_end);
      if (s >= range_hi - tol && !std::isinf(range_hi))
        return right_end * s - beta_hat(g, right_end);
      // Interior: find r* with s in beta(r*); value is constant along any
      // flat stretch of the maximizer set.
      double blo = std::min(-1.0, left_end - 1.0);
      double bhi = std::max(1.0, right_end + 1.0);
      while (beta_eval(g, blo) > s && blo > -1e12) blo *= 2.0;
      while (beta_eval(g, bhi) < s && bhi < 1e12) bhi *= 2.0;
      auto f = [&](double x) { return beta_eval(g, x) - s; };
      const double rstar = bisect(f, blo, bhi);
      return rstar * s - beta_hat(g, rstar);
    }
  }
  return kInf;
}

double truncation(double lambda, double r) {
  assert(lambda > 0.0);
  const double level = 1.0 / lambda;
  return std::clamp(r, -level, level);
}

// ---------------------------------------------------------------------------
// PotentialSpec

namespace {

double psi_raw(const PotentialSpec& p, double r) {
  switch (p.kind) {
    case PotentialKind::DoubleWell: {
      const double q = r * r - p.dw_well * p.dw_well;
      return p.dw_scale * q * q;
    }
    case PotentialKind::Logarithmic: {
      const double c = p.log_c, c0 = p.log_c0;
      const double lp = (1.0 + r) * std::log1p(r);
      const double lm = (1.0 - r) * std::log1p(-r);
      return 0.5 * c * (lp + lm) - 0.5 * c0 * r * r;
    }
    case PotentialKind::Polynomial: {
      double v = 0.0;
      for (std::size_t i = p.poly.size(); i-- > 0;) v = v * r + p.poly[i];
      return v;
    }
  }
  return 0.0;
}

double psi_prime_raw(const PotentialSpec& p, double r) {
  switch (p.kind) {
    case PotentialKind::DoubleWell:
      return 4.0 * p.dw_scale * r * (r * r - p.dw_well * p.dw_well);
    case PotentialKind::Logarithmic:
      return 0.5 * p.log_c * (std::log1p(r) - std::log1p(-r)) - p.log_c0 * r;
    case PotentialKind::Polynomial: {
      double v = 0.0;
      for (std::size_t i = p.poly.size(); i-- > 1;)
        v = v * r + static_cast<double>(i) * p.poly[i];
      return v;
    }
  }
  return 0.0;
}

double psi_second_raw(const PotentialSpec& p, double r) {
  switch (p.kind) {
    case PotentialKind::DoubleWell:
      return 4.0 * p.dw_scale * (3.0 * r * r - p.dw_well * p.dw_well);
    case PotentialKind::Logarithmic:
      return p.log_c / ((1.0 + r) * (1.0 - r)) - p.log_c0;
    case PotentialKind::Polynomial: {
      double v = 0.0;
      for (std::size_t i = p.poly.size(); i-- > 2;)
        v = v * r + static_cast<double>(i * (i - 1)) * p.poly[i];
      return v;
    }
  }
  return 0.0;
}

void check_domain(const PotentialSpec& p, double r) {
  if (!(r > p.a && r < p.b))
    throw DomainEscape("potential argument outside (a, b)");
}

// Clip of the domain usable in double precision: one ulp inside finite
// endpoints, a wide box otherwise.
std::pair<double, double> usable_domain(const PotentialSpec& p) {
  const double lo = std::isinf(p.a) ? -1e12 : std::nextafter(p.a, p.b);
  const double hi = std::isinf(p.b) ? 1e12 : std::nextafter(p.b, p.a);
  return {lo, hi};
}

// Coarse scan plus golden-section refinement of min psi_raw; used for the
// nonnegativity offset.
double min_psi_raw(const PotentialSpec& p) {
  auto [lo, hi] = usable_domain(p);
  if (std::isinf(p.a)) lo = -10.0;
  if (std::isinf(p.b)) hi = 10.0;
  const int n = 4096;
  double best = kInf, best_x = 0.5 * (lo + hi);
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const double v = psi_raw(p, x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  // Golden-section refine around the coarse minimizer.
  double a = std::max(lo, best_x - (hi - lo) / n);
  double b = std::min(hi, best_x + (hi - lo) / n);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = psi_raw(p, x1), f2 = psi_raw(p, x2);
  for (int i = 0; i < 200 && b - a > 1e-14; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = psi_raw(p, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = psi_raw(p, x2);
    }
  }
  return std::min({best, f1, f2});
}

double find_gamma_root(const PotentialSpec& p) {
  auto [lo, hi] = usable_domain(p);
  if (std::isinf(p.a)) lo = -1.0;
  if (std::isinf(p.b)) hi = 1.0;
  while (gamma_eval(p, lo) > 0.0 && (std::isinf(p.a) ? lo > -1e12 : false))
    lo *= 2.0;
  while (gamma_eval(p, hi) < 0.0 && (std::isinf(p.b) ? hi < 1e12 : false))
    hi *= 2.0;
  if (gamma_eval(p, lo) > 0.0 || gamma_eval(p, hi) < 0.0)
    throw BracketFailure("gamma has no root in the usable domain");
  auto f = [&](double x) { return gamma_eval(p, x); };
  return bisect(f, lo, hi);
}

}  // namespace

PotentialSpec PotentialSpec::double_well(double scale, double well, double K) {
  assert(scale > 0.0 && well > 0.0 && K > 0.0);
  PotentialSpec p;
  p.kind = PotentialKind::DoubleWell;
  p.dw_scale = scale;
  p.dw_well = well;
  p.K = K;
  p.offset = 0.0;  // min over R is already 0
  p.r0 = find_gamma_root(p);
  return p;
}

PotentialSpec PotentialSpec::logarithmic(double c, double c0, double K) {
  assert(0.0 < c && c < c0 && K > 0.0);
  PotentialSpec p;
  p.kind = PotentialKind::Logarithmic;
  p.log_c = c;
  p.log_c0 = c0;
  p.a = -1.0;
  p.b = 1.0;
  p.K = K;
  p.offset = -min_psi_raw(p);
  p.r0 = find_gamma_root(p);
  return p;
}

PotentialSpec PotentialSpec::polynomial(std::vector<double> coeffs, double K) {
  assert(K > 0.0);
  PotentialSpec p;
  p.kind = PotentialKind::Polynomial;
  p.poly = std::move(coeffs);
  p.K = K;
  p.offset = -std::min(0.0, min_psi_raw(p));
  p.r0 = find_gamma_root(p);
  return p;
}

double psi_eval(const PotentialSpec& p, double r) {
  check_domain(p, r);
  return psi_raw(p, r) + p.offset;
}

double psi_prime(const PotentialSpec& p, double r) {
  check_domain(p, r);
  return psi_prime_raw(p, r);
}

double psi_second(const PotentialSpec& p, double r) {
  check_domain(p, r);
  return psi_second_raw(p, r);
}

double gamma_eval(const PotentialSpec& p, double r) {
  return psi_prime_raw(p, r) + p.K * r;
}

double gamma_prime(const PotentialSpec& p, double r) {
  return psi_second_raw(p, r) + p.K;
}

double gamma_resolvent(const PotentialSpec& p, double lambda, double r) {
  assert(lambda > 0.0);
  auto [lo, hi] = usable_domain(p);
  if (std::isinf(p.a)) {
    lo = std::min(r, p.r0) - 1.0;
    while (lo + lambda * gamma_eval(p, lo) > r && lo > -1e12)
      lo = 2.0 * lo - std::abs(r);
  }
  if (std::isinf(p.b)) {
    hi = std::max(r, p.r0) + 1.0;
    while (hi + lambda * gamma_eval(p, hi) < r && hi < 1e12)
      hi = 2.0 * hi + std::abs(r);
  }
  auto f = [&](double s) { return s + lambda * gamma_eval(p, s) - r; };
  double flo = f(lo), fhi = f(hi);
  // Near a finite endpoint gamma diverges; in double precision the residual
  // may not change sign within one ulp of the edge. The resolvent then
  // saturates at the innermost representable value.
  if (flo > 0.0 && !std::isinf(p.a)) return lo;
  if (fhi < 0.0 && !std::isinf(p.b)) return hi;
  if (flo > 0.0 || fhi < 0.0)
    throw BracketFailure("gamma_resolvent: no sign change on bracket");

  // Safeguarded Newton with bisection fallback, run to the roundoff floor:
  // downstream residuals pass through 1/h^2 stencils, so the scalar solves
  // must be exact to the ulp, not merely to a fixed tolerance.
  double s = std::clamp(r, lo, hi);
  double fs = f(s);
  for (int i = 0; i < kMaxBisect && fs != 0.0; ++i) {
    if (fs > 0.0)
      hi = s;
    else
      lo = s;
    const double df = 1.0 + lambda * gamma_prime(p, s);
    double snew = s - fs / df;
    if (!(snew > lo && snew < hi)) snew = 0.5 * (lo + hi);
    if (snew == s || snew <= lo || snew >= hi) break;
    s = snew;
    fs = f(s);
  }
  return s;
}

double gamma_yosida(const PotentialSpec& p, double lambda, double r) {
  return (r - gamma_resolvent(p, lambda, r)) / lambda;
}

double gamma_yosida_derivative(const PotentialSpec& p, double lambda,
                               double r) {
  const double s = gamma_resolvent(p, lambda, r);
  const double gp = gamma_prime(p, s);
  return gp / (1.0 + lambda * gp);
}

double trunc_resolvent_derivative(const PotentialSpec& p, double lambda,
                                  double r) {
  const double s = gamma_resolvent(p, lambda, r);
  if (std::abs(s) >= 1.0 / lambda) return 0.0;
  return 1.0 / (1.0 + lambda * gamma_prime(p, s));
}

}  // namespace dnch

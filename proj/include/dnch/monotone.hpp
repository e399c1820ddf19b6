#ifndef DNCH_MONOTONE_HPP
#define DNCH_MONOTONE_HPP

#include <limits>
#include <vector>

#include "dnch/errors.hpp"

namespace dnch {

/// Scalar convex-analysis toolkit: maximal monotone graphs beta with their
/// resolvents, Yosida approximations and Moreau envelopes, and semiconvex
/// potentials psi with the shifted monotone part gamma = psi' + K id.

// ---------------------------------------------------------------------------
// Maximal monotone graphs

enum class GraphKind { Zero, Sign, Power, PiecewiseLinear };

struct GraphSpec {
  GraphKind kind = GraphKind::Zero;

  // Power graph: beta(r) = coeff * sign(r) * |r|^p, p >= 1, coeff > 0.
  double power_p = 1.0;
  double power_coeff = 1.0;

  // Piecewise-linear graph: continuous, nondecreasing, beta(0) = 0.
  // slopes.size() == breakpoints.size() + 1, slopes >= 0.
  std::vector<double> breakpoints;
  std::vector<double> slopes;

  static GraphSpec zero();
  static GraphSpec sign();
  static GraphSpec power(double p, double coeff);
  static GraphSpec piecewise_linear(std::vector<double> breakpoints,
                                    std::vector<double> slopes);
};

/// Single-valued selection of beta (0 at multivalued points).
double beta_eval(const GraphSpec& g, double r);

/// Convex primitive beta_hat(r) = integral of beta from 0 to r.
double beta_hat(const GraphSpec& g, double r);

/// s = (I + lambda beta)^{-1}(r): the unique s with s + lambda beta(s) ∋ r.
double resolvent(const GraphSpec& g, double lambda, double r);

/// beta_lambda(r) = (r - resolvent(lambda, r)) / lambda.
double yosida(const GraphSpec& g, double lambda, double r);

/// a.e. derivative of beta_lambda at r; right-derivative at kinks.
/// Always in [0, 1/lambda].
double yosida_derivative(const GraphSpec& g, double lambda, double r);

/// Moreau envelope beta_hat_lambda(r) =
///   (lambda/2) beta_lambda(r)^2 + beta_hat(resolvent(lambda, r)).
double moreau_envelope(const GraphSpec& g, double lambda, double r);

/// Convex conjugate of beta_hat at s. Returns +infinity outside the domain.
double conjugate_eval(const GraphSpec& g, double s);

/// Truncation at level 1/lambda: clamp(r, -1/lambda, 1/lambda).
double truncation(double lambda, double r);

// ---------------------------------------------------------------------------
// Semiconvex potentials

enum class PotentialKind { DoubleWell, Logarithmic, Polynomial };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::DoubleWell;

  // Double well: psi(r) = scale * (r^2 - well^2)^2.
  double dw_scale = 0.25;
  double dw_well = 1.0;

  // Logarithmic on (-1, 1), 0 < c < c0:
  //   psi(r) = (c/2)[(1+r)ln(1+r) + (1-r)ln(1-r)] - (c0/2) r^2 + offset.
  double log_c = 1.0;
  double log_c0 = 2.0;

  // Polynomial: ascending coefficients, domain all of R.
  std::vector<double> poly;

  double a = -std::numeric_limits<double>::infinity();  // domain endpoints
  double b = std::numeric_limits<double>::infinity();
  double K = 1.0;       // semiconvexity: psi'' > -K on (a, b)
  double offset = 0.0;  // additive constant making psi >= 0
  double r0 = 0.0;      // unique root of gamma in (a, b)

  static PotentialSpec double_well(double scale = 0.25, double well = 1.0,
                                   double K = 1.0);
  static PotentialSpec logarithmic(double c, double c0, double K);
  static PotentialSpec polynomial(std::vector<double> coeffs, double K);
};

/// psi, psi', psi''; throw DomainEscape outside (a, b).
double psi_eval(const PotentialSpec& p, double r);
double psi_prime(const PotentialSpec& p, double r);
double psi_second(const PotentialSpec& p, double r);

/// gamma(r) = psi'(r) + K r, strictly increasing on (a, b).
double gamma_eval(const PotentialSpec& p, double r);
double gamma_prime(const PotentialSpec& p, double r);

/// s = (I + lambda gamma)^{-1}(r) in (a, b); safeguarded Newton-bisection.
double gamma_resolvent(const PotentialSpec& p, double lambda, double r);

/// gamma_lambda(r) = (r - gamma_resolvent(lambda, r)) / lambda
///                 = gamma(gamma_resolvent(lambda, r)).
double gamma_yosida(const PotentialSpec& p, double lambda, double r);

/// a.e. derivative of gamma_lambda: gamma'(s) / (1 + lambda gamma'(s)).
double gamma_yosida_derivative(const PotentialSpec& p, double lambda, double r);

/// d/dr [ T_lambda((I + lambda gamma)^{-1}(r)) ], the entry used in the
/// Newton Jacobian for the -K T_lambda resolvent term.
double trunc_resolvent_derivative(const PotentialSpec& p, double lambda,
                                  double r);

}  // namespace dnch

#endif

#include "dnch/grid.hpp"

#include <cassert>
#include <cmath>

namespace dnch {

Grid1D Grid1D::make(double L, int N) {
  assert(L > 0.0 && N >= 4);
  Grid1D g;
  g.L = L;
  g.N = N;
  g.h = L / N;
  return g;
}

Eigen::ArrayXd lap_neumann(const Grid1D& g, const Eigen::ArrayXd& f) {
  assert(f.size() == g.N);
  const int n = g.N;
  const double ih2 = 1.0 / (g.h * g.h);
  Eigen::ArrayXd out(n);
  for (int i = 0; i < n; ++i) {
    const double fm = (i == 0) ? f[0] : f[i - 1];
    const double fp = (i == n - 1) ? f[n - 1] : f[i + 1];
    out[i] = ((fm + fp) - 2.0 * f[i]) * ih2;
  }
  return out;
}

Eigen::ArrayXd lap_dirichlet(const Grid1D& g, const Eigen::ArrayXd& f) {
  assert(f.size() == g.N);
  const int n = g.N;
  const double ih2 = 1.0 / (g.h * g.h);
  Eigen::ArrayXd out(n);
  for (int i = 0; i < n; ++i) {
    const double fm = (i == 0) ? -f[0] : f[i - 1];
    const double fp = (i == n - 1) ? -f[n - 1] : f[i + 1];
    out[i] = ((fm + fp) - 2.0 * f[i]) * ih2;
  }
  return out;
}

std::pair<double, double> boundary_flux(const Grid1D& g,
                                        const Eigen::ArrayXd& mu) {
  assert(mu.size() == g.N);
  // left face: (mu_0 - ghost)/h with ghost = -mu_0; right analogously.
  const double left = 2.0 * mu[0] / g.h;
  const double right = -2.0 * mu[g.N - 1] / g.h;
  return {left, right};
}

Eigen::MatrixXd lap_neumann_matrix(const Grid1D& g) {
  const int n = g.N;
  const double ih2 = 1.0 / (g.h * g.h);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = -2.0 * ih2;
    if (i > 0) A(i, i - 1) += ih2;
    if (i < n - 1) A(i, i + 1) += ih2;
  }
  A(0, 0) += ih2;          // mirrored ghost
  A(n - 1, n - 1) += ih2;  // mirrored ghost
  return A;
}

Eigen::MatrixXd lap_dirichlet_matrix(const Grid1D& g) {
  const int n = g.N;
  const double ih2 = 1.0 / (g.h * g.h);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = -2.0 * ih2;
    if (i > 0) A(i, i - 1) += ih2;
    if (i < n - 1) A(i, i + 1) += ih2;
  }
  A(0, 0) -= ih2;          // antisymmetric ghost
  A(n - 1, n - 1) -= ih2;  // antisymmetric ghost
  return A;
}

double norm_l2(const Grid1D& g, const Eigen::ArrayXd& f) {
  return std::sqrt(g.h * f.square().sum());
}

double norm_sup(const Eigen::ArrayXd& f) { return f.abs().maxCoeff(); }

double mean(const Grid1D& g, const Eigen::ArrayXd& f) {
  return g.h * f.sum() / g.L;
}

double h1_seminorm(const Grid1D& g, const Eigen::ArrayXd& f, Bc bc) {
  assert(f.size() == g.N);
  const int n = g.N;
  double acc = 0.0;
  for (int face = 1; face < n; ++face) {
    const double d = (f[face] - f[face - 1]) / g.h;
    acc += d * d;
  }
  if (bc == Bc::Dirichlet) {
    // boundary faces sit h/2 from the nearest center; the half weight makes
    // h * sum (lap_dirichlet f) f = -seminorm^2 exact
    const double dl = 2.0 * f[0] / g.h;
    const double dr = 2.0 * f[n - 1] / g.h;
    acc += 0.5 * (dl * dl + dr * dr);
  }
  return std::sqrt(g.h * acc);
}

}  // namespace dnch

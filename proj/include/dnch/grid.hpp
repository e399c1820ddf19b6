#ifndef DNCH_GRID_HPP
#define DNCH_GRID_HPP

#include <Eigen/Dense>
#include <utility>

#include "dnch/errors.hpp"

namespace dnch {

/// 1-D cell-centered finite differences on (0, L). Boundary conditions enter
/// only through the ghost convention: mirrored ghosts for homogeneous Neumann
/// (u), antisymmetric ghosts for homogeneous Dirichlet (mu), so both fields
/// share one index space and the discrete divergence theorem is exact.

struct Grid1D {
  double L = 1.0;
  int N = 64;
  double h = 1.0 / 64.0;

  static Grid1D make(double L, int N);
  double cell_center(int i) const { return (i + 0.5) * h; }
};

struct Field {
  Grid1D grid;
  Eigen::ArrayXd values;

  static Field zero(const Grid1D& g) {
    return Field{g, Eigen::ArrayXd::Zero(g.N)};
  }
};

enum class Bc { Neumann, Dirichlet };

/// 3-point Laplacian with mirrored ghosts (ghost = first interior value).
Eigen::ArrayXd lap_neumann(const Grid1D& g, const Eigen::ArrayXd& f);

/// 3-point Laplacian with antisymmetric ghosts (ghost = -first interior
/// value), placing the homogeneous Dirichlet zero at the domain faces.
Eigen::ArrayXd lap_dirichlet(const Grid1D& g, const Eigen::ArrayXd& f);

/// Face fluxes of the Dirichlet Laplacian:
///   h * sum_i (lap_dirichlet f)_i = right - left   (exact arithmetic).
std::pair<double, double> boundary_flux(const Grid1D& g,
                                        const Eigen::ArrayXd& mu);

/// Dense operator matrices, used for Jacobians and elliptic solves.
Eigen::MatrixXd lap_neumann_matrix(const Grid1D& g);
Eigen::MatrixXd lap_dirichlet_matrix(const Grid1D& g);

double norm_l2(const Grid1D& g, const Eigen::ArrayXd& f);
double norm_sup(const Eigen::ArrayXd& f);
double mean(const Grid1D& g, const Eigen::ArrayXd& f);

/// sqrt(h * sum_faces ((Df)/h)^2) with face differences taken under the given
/// ghost convention (Neumann: interior faces only; Dirichlet: boundary faces
/// contribute 2 f / h).
double h1_seminorm(const Grid1D& g, const Eigen::ArrayXd& f, Bc bc);

inline Field lap_neumann(const Field& f) {
  return {f.grid, lap_neumann(f.grid, f.values)};
}
inline Field lap_dirichlet(const Field& f) {
  return {f.grid, lap_dirichlet(f.grid, f.values)};
}
inline std::pair<double, double> boundary_flux(const Field& f) {
  return boundary_flux(f.grid, f.values);
}
inline double norm_l2(const Field& f) { return norm_l2(f.grid, f.values); }
inline double norm_sup(const Field& f) { return norm_sup(f.values); }
inline double mean(const Field& f) { return mean(f.grid, f.values); }
inline double h1_seminorm(const Field& f, Bc bc) {
  return h1_seminorm(f.grid, f.values, bc);
}

}  // namespace dnch

#endif

#include "dnch/presets.hpp"

#include <cmath>

namespace dnch {

Eigen::ArrayXd cosine_profile(const Grid1D& g, double amplitude) {
  const double pi = 3.14159265358979323846;
  Eigen::ArrayXd u(g.N);
  for (int i = 0; i < g.N; ++i)
    u[i] = amplitude * std::cos(pi * g.cell_center(i) / g.L);
  return u;
}

ProblemSpec make_preset(const std::string& name) {
  ProblemSpec s;
  s.grid = Grid1D::make(1.0, 64);
  s.eps = 1.0;
  s.delta = 1.0;
  s.lambda = 1e-5;
  s.tau = 1e-3;
  s.T = 0.1;
  s.forcing = nullptr;

  if (name == "logwell-sign") {
    // K = c0 makes gamma the pure logarithmic part, strictly increasing.
    s.potential = PotentialSpec::logarithmic(1.0, 2.0, 2.0);
    s.graph = GraphSpec::sign();
    s.u0 = cosine_profile(s.grid, 0.9);
    s.a0 = -0.9;
    s.b0 = 0.9;
  } else if (name == "quartic-zero") {
    s.potential = PotentialSpec::double_well(0.25, 1.0, 1.0);
    s.graph = GraphSpec::zero();
    s.u0 = cosine_profile(s.grid, 0.9);
    s.a0 = -0.9;
    s.b0 = 0.9;
  } else if (name == "quartic-power") {
    s.potential = PotentialSpec::double_well(0.25, 1.0, 1.0);
    s.graph = GraphSpec::power(3.0, 1.0);
    s.u0 = cosine_profile(s.grid, 0.9);
    s.a0 = -0.9;
    s.b0 = 0.9;
  } else if (name == "stationary") {
    s.potential = PotentialSpec::double_well(0.25, 1.0, 1.0);
    s.graph = GraphSpec::sign();
    s.u0 = Eigen::ArrayXd::Constant(s.grid.N, 1.0);  // well bottom
    s.a0 = 1.0;
    s.b0 = 1.0;
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  return s;
}

std::vector<std::string> preset_names() {
  return {"logwell-sign", "quartic-zero", "quartic-power", "stationary"};
}

}  // namespace dnch

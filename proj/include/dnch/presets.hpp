#ifndef DNCH_PRESETS_HPP
#define DNCH_PRESETS_HPP

#include <string>
#include <vector>

#include "dnch/stepper.hpp"

namespace dnch {

/// Named scenarios, each satisfying the full problem invariants and the
/// hypothesis set of at least one of the convergence regimes.
///
///   logwell-sign   logarithmic potential (c=1, c0=2), sign graph
///   quartic-zero   quartic double well, beta = 0 (viscous C-H)
///   quartic-power  quartic double well, beta(r) = r^3
///   stationary     quartic double well seeded at the well bottom
ProblemSpec make_preset(const std::string& name);

std::vector<std::string> preset_names();

/// u0(x) = amplitude * cos(pi x / L).
Eigen::ArrayXd cosine_profile(const Grid1D& g, double amplitude);

}  // namespace dnch

#endif

#ifndef DNCH_ERRORS_HPP
#define DNCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dnch {

// Inner nonlinear solve failed in both the Newton and the relaxed phase.
struct NonConvergence : std::runtime_error {
  NonConvergence(const std::string& what, int step_index, double final_residual)
      : std::runtime_error(what), step(step_index), residual(final_residual) {}
  int step;         // failing time step (0 for stationary solves)
  double residual;  // sup-norm residual at abort
};

// Iterates could not be kept inside the potential domain (a, b).
struct DomainEscape : std::runtime_error {
  explicit DomainEscape(const std::string& what) : std::runtime_error(what) {}
};

// The residual of a scalar root problem does not change sign on the
// admissible bracket; signals a corrupted spec.
struct BracketFailure : std::runtime_error {
  explicit BracketFailure(const std::string& what) : std::runtime_error(what) {}
};

// psi' never reaches the requested level (bounded-derivative potentials).
struct ThresholdNotFound : std::runtime_error {
  explicit ThresholdNotFound(const std::string& what) : std::runtime_error(what) {}
};

// All errors handed to the rate fit are below resolution.
struct DegenerateFit : std::runtime_error {
  explicit DegenerateFit(const std::string& what) : std::runtime_error(what) {}
};

// Config parsing / validation failure; line < 0 means semantic error.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& what, int line_number = -1)
      : std::runtime_error(what), line(line_number) {}
  int line;
};

}  // namespace dnch

#endif

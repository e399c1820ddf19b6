#ifndef DNCH_CONFIG_HPP
#define DNCH_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dnch/stepper.hpp"

namespace dnch {

/// Line-based `key = value` config with `[section]` headers and `#` comments.
/// Sections: [run], [problem], [sweep], [probe]. Unknown keys are hard
/// errors. Exactly one of a preset or a full [problem] block must be given.

enum class Command {
  Solve,
  Diagnose,
  SweepDelta,
  SweepEps,
  ProbeDependence,
  CheckGraphs,
};

struct RunConfig {
  Command command = Command::Solve;
  std::string preset;     // empty when a [problem] block was given
  ProblemSpec problem;    // materialized spec (from preset or block)
  std::string output = "out";
  std::uint64_t seed = 0;
  bool emit_csv = true;
  bool emit_jsonl = true;
  bool quiet = false;
  std::vector<double> sweep_values;  // empty: command-specific default
  std::vector<double> probe_scales;  // empty: default decades
};

/// Parse and validate; throws ConfigError with the offending line number for
/// syntax errors and line -1 for semantic violations.
RunConfig parse_config(const std::string& text);

Command parse_command(const std::string& name);
std::string command_name(Command c);

}  // namespace dnch

#endif

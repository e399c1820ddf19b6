#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dnch/presets.hpp"
#include "dnch/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dnch::ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"doubly nonlinear viscous Cahn-Hilliard laboratory"};

  std::string config_path, output, preset, emit, command;
  std::uint64_t seed = 0;
  bool quiet = false;
  app.add_option("command", command,
                 "solve | diagnose | sweep-delta | sweep-eps | "
                 "probe-dependence | check-graphs");
  app.add_option("--config", config_path, "config file path");
  app.add_option("--output", output, "output directory");
  app.add_option("--preset", preset, "named scenario");
  app.add_option("--seed", seed, "seed for randomized batteries");
  app.add_option("--emit", emit, "comma list of csv,jsonl");
  app.add_flag("--quiet", quiet, "suppress the run header");
  CLI11_PARSE(app, argc, argv);

  try {
    dnch::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = dnch::parse_config(read_file(config_path));
    } else {
      // No config file: command and preset flags must fully determine the run.
      if (command.empty() || preset.empty())
        throw dnch::ConfigError(
            "without --config, both a command and --preset are required");
      cfg.preset = preset;
      cfg.problem = dnch::make_preset(preset);
      cfg.problem.validate();
    }
    // Flags override the config file.
    if (!command.empty()) cfg.command = dnch::parse_command(command);
    if (!output.empty()) cfg.output = output;
    if (!preset.empty() && config_path.empty()) cfg.preset = preset;
    if (app.count("--seed") > 0) cfg.seed = seed;
    if (quiet) cfg.quiet = true;
    if (!emit.empty()) {
      cfg.emit_csv = emit.find("csv") != std::string::npos;
      cfg.emit_jsonl = emit.find("jsonl") != std::string::npos;
      if (!cfg.emit_csv && !cfg.emit_jsonl)
        throw dnch::ConfigError("--emit must name csv and/or jsonl");
    }
    if (!preset.empty() && !config_path.empty()) {
      cfg.preset = preset;
      cfg.problem = dnch::make_preset(preset);
      cfg.problem.validate();
    }
    return dnch::run(cfg);
  } catch (const dnch::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

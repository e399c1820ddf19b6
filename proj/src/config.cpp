#include "dnch/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "dnch/presets.hpp"

namespace dnch {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + v + "'", line);
  }
}

bool to_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("invalid boolean '" + v + "'", line);
}

std::vector<double> to_list(const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(item, line));
  }
  return out;
}

struct KV {
  std::string value;
  int line;
};

ProblemSpec build_problem(const std::map<std::string, KV>& kv) {
  auto get = [&](const std::string& key) -> const KV* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto num = [&](const std::string& key, double dflt) {
    const KV* e = get(key);
    return e ? to_double(e->value, e->line) : dflt;
  };

  ProblemSpec s;
  s.eps = num("eps", 1.0);
  s.delta = num("delta", 1.0);
  s.lambda = num("lambda", 1e-5);
  s.tau = num("tau", 1e-3);
  s.T = num("T", 0.1);
  const double L = num("L", 1.0);
  const int N = static_cast<int>(num("N", 64));
  s.grid = Grid1D::make(L, N);

  std::string graph = "zero";
  if (const KV* e = get("graph")) graph = e->value;
  if (graph == "zero") {
    s.graph = GraphSpec::zero();
  } else if (graph == "sign") {
    s.graph = GraphSpec::sign();
  } else if (graph == "power") {
    s.graph = GraphSpec::power(num("graph_p", 1.0), num("graph_coeff", 1.0));
  } else {
    throw ConfigError("unknown graph kind '" + graph + "'", get("graph")->line);
  }

  std::string pot = "double_well";
  if (const KV* e = get("potential")) pot = e->value;
  if (pot == "double_well") {
    s.potential = PotentialSpec::double_well(num("scale", 0.25),
                                             num("well", 1.0), num("K", 1.0));
  } else if (pot == "logarithmic") {
    s.potential = PotentialSpec::logarithmic(num("c", 1.0), num("c0", 2.0),
                                             num("K", 2.0));
  } else {
    throw ConfigError("unknown potential kind '" + pot + "'",
                      get("potential")->line);
  }

  std::string u0 = "cosine";
  if (const KV* e = get("u0")) u0 = e->value;
  if (u0 == "cosine") {
    const double amp = num("u0_amplitude", 0.9);
    s.u0 = cosine_profile(s.grid, amp);
    s.a0 = num("a0", -std::abs(amp));
    s.b0 = num("b0", std::abs(amp));
  } else if (u0 == "constant") {
    const double val = num("u0_value", 0.0);
    s.u0 = Eigen::ArrayXd::Constant(s.grid.N, val);
    s.a0 = num("a0", val);
    s.b0 = num("b0", val);
  } else {
    throw ConfigError("unknown u0 kind '" + u0 + "'", get("u0")->line);
  }

  std::string forcing = "zero";
  if (const KV* e = get("forcing")) forcing = e->value;
  if (forcing == "zero") {
    s.forcing = nullptr;
  } else if (forcing == "constant") {
    const double val = num("forcing_value", 0.0);
    s.forcing = [val](const Grid1D& g, double) {
      return Eigen::ArrayXd::Constant(g.N, val).eval();
    };
  } else {
    throw ConfigError("unknown forcing kind '" + forcing + "'",
                      get("forcing")->line);
  }
  return s;
}

const std::map<std::string, int>& problem_keys() {
  static const std::map<std::string, int> keys = {
      {"eps", 0},       {"delta", 0},        {"lambda", 0},
      {"tau", 0},       {"T", 0},            {"L", 0},
      {"N", 0},         {"graph", 0},        {"graph_p", 0},
      {"graph_coeff", 0}, {"potential", 0},  {"c", 0},
      {"c0", 0},        {"K", 0},            {"scale", 0},
      {"well", 0},      {"u0", 0},           {"u0_amplitude", 0},
      {"u0_value", 0},  {"a0", 0},           {"b0", 0},
      {"forcing", 0},   {"forcing_value", 0}};
  return keys;
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "solve") return Command::Solve;
  if (name == "diagnose") return Command::Diagnose;
  if (name == "sweep-delta") return Command::SweepDelta;
  if (name == "sweep-eps") return Command::SweepEps;
  if (name == "probe-dependence") return Command::ProbeDependence;
  if (name == "check-graphs") return Command::CheckGraphs;
  throw ConfigError("unknown command '" + name + "'");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Diagnose: return "diagnose";
    case Command::SweepDelta: return "sweep-delta";
    case Command::SweepEps: return "sweep-eps";
    case Command::ProbeDependence: return "probe-dependence";
    case Command::CheckGraphs: return "check-graphs";
  }
  return "solve";
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, KV> problem_kv;
  bool has_command = false;

  std::string section = "run";
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("malformed section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (section != "run" && section != "problem" && section != "sweep" &&
          section != "probe")
        throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("expected 'key = value'", line);

    if (section == "run") {
      if (key == "command") {
        try {
          cfg.command = parse_command(value);
        } catch (const ConfigError& e) {
          throw ConfigError(e.what(), line);
        }
        has_command = true;
      } else if (key == "preset") {
        cfg.preset = value;
      } else if (key == "output") {
        cfg.output = value;
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
      } else if (key == "emit") {
        cfg.emit_csv = value.find("csv") != std::string::npos;
        cfg.emit_jsonl = value.find("jsonl") != std::string::npos;
        if (!cfg.emit_csv && !cfg.emit_jsonl)
          throw ConfigError("emit must name csv and/or jsonl", line);
      } else if (key == "quiet") {
        cfg.quiet = to_bool(value, line);
      } else {
        throw ConfigError("unknown key '" + key + "' in [run]", line);
      }
    } else if (section == "problem") {
      if (!problem_keys().count(key))
        throw ConfigError("unknown key '" + key + "' in [problem]", line);
      problem_kv[key] = KV{value, line};
    } else if (section == "sweep") {
      if (key == "values")
        cfg.sweep_values = to_list(value, line);
      else
        throw ConfigError("unknown key '" + key + "' in [sweep]", line);
    } else {  // probe
      if (key == "scales")
        cfg.probe_scales = to_list(value, line);
      else
        throw ConfigError("unknown key '" + key + "' in [probe]", line);
    }
  }

  if (!has_command) throw ConfigError("missing 'command' in [run]");
  if (!cfg.preset.empty() && !problem_kv.empty())
    throw ConfigError(
        "give either a preset or a [problem] block, not both");
  if (cfg.preset.empty() && problem_kv.empty())
    throw ConfigError("give a preset or a [problem] block");

  if (!cfg.preset.empty())
    cfg.problem = make_preset(cfg.preset);
  else
    cfg.problem = build_problem(problem_kv);
  cfg.problem.validate();
  return cfg;
}

}  // namespace dnch

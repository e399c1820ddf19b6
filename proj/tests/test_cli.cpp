#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dnch/presets.hpp"
#include "dnch/runner.hpp"

using namespace dnch;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_config: minimal preset config") {
  const RunConfig cfg = parse_config("command = solve\npreset = quartic-zero\n");
  CHECK(cfg.command == Command::Solve);
  CHECK(cfg.preset == "quartic-zero");
  CHECK(cfg.problem.eps == 1.0);
  CHECK(cfg.problem.grid.N == 64);
  CHECK(cfg.emit_csv);
  CHECK(cfg.emit_jsonl);
}

TEST_CASE("parse_config: problem block") {
  const std::string text =
      "[run]\n"
      "command = diagnose\n"
      "output = some/dir\n"
      "[problem]\n"
      "eps = 0.5\n"
      "delta = 0.25  # inline comment\n"
      "N = 32\n"
      "potential = double_well\n"
      "graph = power\n"
      "graph_p = 3\n";
  const RunConfig cfg = parse_config(text);
  CHECK(cfg.command == Command::Diagnose);
  CHECK(cfg.output == "some/dir");
  CHECK(cfg.problem.eps == 0.5);
  CHECK(cfg.problem.delta == 0.25);
  CHECK(cfg.problem.grid.N == 32);
  CHECK(cfg.problem.graph.kind == GraphKind::Power);
  CHECK(cfg.problem.graph.power_p == 3.0);
}

TEST_CASE("parse_config: dual-regularization invariant") {
  const std::string text =
      "[run]\ncommand = solve\n[problem]\neps = 0\ndelta = 0\n";
  try {
    parse_config(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("regulariz") != std::string::npos);
  }
}

TEST_CASE("parse_config: unknown key carries its line") {
  const std::string text =
      "[run]\ncommand = solve\n[problem]\nepsilonn = 1\n";
  try {
    parse_config(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 4);
    CHECK(std::string(e.what()).find("epsilonn") != std::string::npos);
  }
}

TEST_CASE("parse_config: structural errors") {
  CHECK_THROWS_AS(parse_config("preset = quartic-zero\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("command = solve\n"), ConfigError);
  CHECK_THROWS_AS(
      parse_config("command = solve\npreset = quartic-zero\n"
                   "[problem]\neps = 1\n"),
      ConfigError);
  CHECK_THROWS_AS(parse_config("command = warp\npreset = stationary\n"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config("command = solve\npreset = quartic-zero\nnot a pair\n"),
      ConfigError);
}

TEST_CASE("run: determinism of emitted CSVs") {
  RunConfig cfg = parse_config(
      "[run]\ncommand = solve\npreset = quartic-zero\nquiet = true\n");
  cfg.problem.T = 0.01;
  cfg.output = "cli_det_a";
  REQUIRE(run(cfg) == 0);
  cfg.output = "cli_det_b";
  REQUIRE(run(cfg) == 0);
  CHECK(slurp("cli_det_a/series.csv") == slurp("cli_det_b/series.csv"));
  CHECK(slurp("cli_det_a/trajectory.csv") ==
        slurp("cli_det_b/trajectory.csv"));
}

TEST_CASE("run: diagnose exit codes") {
  RunConfig cfg = parse_config(
      "[run]\ncommand = diagnose\npreset = stationary\nquiet = true\n");
  cfg.output = "cli_diag";
  CHECK(run(cfg) == 0);

  // corrupted fixture: a tampered trajectory must fail the diagnose gate
  Trajectory traj = solve(cfg.problem);
  traj.states[3].u += 5.0;  // breaks bounds, flux and energy bookkeeping
  const DiagnoseResult d = diagnose_trajectory(traj);
  CHECK_FALSE(d.pass);
  Trajectory nan_traj = solve(cfg.problem);
  nan_traj.states[2].mu[0] = std::nan("");
  const DiagnoseResult dn = diagnose_trajectory(nan_traj);
  CHECK_FALSE(dn.finite);
  CHECK_FALSE(dn.pass);
}

TEST_CASE("run: check-graphs battery") {
  RunConfig cfg;
  cfg.command = Command::CheckGraphs;
  cfg.problem = make_preset("stationary");
  cfg.output = "cli_graphs";
  cfg.quiet = true;
  cfg.seed = 1234;
  CHECK(run(cfg) == 0);
}

TEST_CASE("cli binary: stationary solve") {
  const char* cli = std::getenv("DNCH_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd = std::string(cli) +
                          " solve --preset stationary --output cli_bin "
                          "--quiet > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc == 0);
  // every w column of every snapshot stays at the fixed point
  std::ifstream in("cli_bin/trajectory.csv");
  REQUIRE(in.good());
  std::string header, line;
  std::getline(in, header);
  std::vector<int> wcols;
  {
    std::stringstream hs(header);
    std::string col;
    int idx = 0;
    while (std::getline(hs, col, ',')) {
      if (col.rfind("w_", 0) == 0) wcols.push_back(idx);
      ++idx;
    }
  }
  REQUIRE_FALSE(wcols.empty());
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string cell;
    int idx = 0;
    std::size_t next = 0;
    while (std::getline(ls, cell, ',')) {
      if (next < wcols.size() && idx == wcols[next]) {
        CHECK(std::abs(std::stod(cell)) <= 1e-8);
        ++next;
      }
      ++idx;
    }
  }
}

TEST_CASE("cli binary: config error exit code") {
  const char* cli = std::getenv("DNCH_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd =
      std::string(cli) + " solve --preset nosuch > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(rc) == 1);
}

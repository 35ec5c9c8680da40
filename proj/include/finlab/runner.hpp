#pragma once

#include "finlab/scenario.hpp"

namespace finlab {

// Exit codes of the `run` entry point.
enum RunExit : int {
  kRunOk = 0,
  kRunVerificationFailed = 1,
  kRunParseError = 2,
  kRunHypothesisViolated = 3,
};

struct RunOverrides {
  std::optional<uint64_t> seed;
  std::optional<unsigned> threads;
};

struct RunOutcome {
  int exit_code = kRunOk;
  std::string report_path;  // canonical machine-readable report (JSON)
};

// Executes the scenario's tasks in declaration order, writes report.json (the
// canonical, timestamp-free report), run_meta.json (timings), and per-task CSV
// artifacts into out_dir.
RunOutcome run_scenario(const Scenario& scenario, const std::string& out_dir,
                        const RunOverrides& overrides = {});

// Convenience wrapper used by the CLI: parses, runs, maps parse errors to exit
// code 2 (diagnostic on stderr).
int run_scenario_file(const std::string& scenario_path, const std::string& out_dir,
                      const RunOverrides& overrides = {});

std::string tasks_help_text();

}  // namespace finlab

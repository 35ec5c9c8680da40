#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "finlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"finlab: a numerical laboratory for Finsler geometry"};
  app.require_subcommand(0, 1);

  std::string scenario_path;
  std::string out_dir = "out";
  uint64_t seed = 0;
  unsigned threads = 0;

  CLI::App* run = app.add_subcommand("run", "run a scenario file and write reports");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  CLI::Option* out_opt = run->add_option("--out", out_dir, "output directory");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
  CLI::Option* threads_opt = run->add_option("--threads", threads, "worker threads");

  CLI::App* tasks = app.add_subcommand("tasks", "list available scenario tasks");

  CLI11_PARSE(app, argc, argv);

  if (tasks->parsed()) {
    std::cout << finlab::tasks_help_text();
    return 0;
  }
  if (run->parsed()) {
    finlab::RunOverrides overrides;
    if (*seed_opt) overrides.seed = seed;
    if (*threads_opt) overrides.threads = threads;
    (void)*out_opt;
    return finlab::run_scenario_file(scenario_path, out_dir, overrides);
  }

  std::cout << app.help() << "\n" << finlab::tasks_help_text();
  return 0;
}

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "finlab/bounds.hpp"

namespace finlab {

struct ScenarioParseError : FinslerError {
  using FinslerError::FinslerError;
};

// One requested pipeline stage.
struct TaskSpec {
  std::string task;            // one of the 8 task names
  std::string point;           // named point (tensors, curvature, geodesic)
  std::string pair;            // named pair (distance, lemma-check, bound-verify)
  Vec direction;               // tensors/curvature/geodesic
  double length = 1.0;         // geodesic
  std::string pairs_mode;      // sweep: "random" or empty
  std::vector<std::string> pair_list;  // sweep with explicit pairs
};

struct RandomPairsSpec {
  int count = 50;
  double radius = 5.0;
  Vec center;
  double min_distance = 0.0;  // Euclidean pre-filter on the chart
  double max_distance = 0.0;  // 0: none
};

// Parsed scenario file: metric + optional field/lambda, named points and
// pairs, sampling plans, and the task list in declaration order.
struct Scenario {
  uint64_t seed = 0;
  unsigned threads = 1;
  MetricModel metric;
  std::optional<VectorFieldModel> field;
  std::optional<double> lambda;
  std::map<std::string, Vec> points;
  std::map<std::string, std::pair<std::string, std::string>> pairs;

  SamplePlan structure_plan;
  int structure_per_axis = 4;
  SolitonSamplePlan soliton_plan;
  int soliton_per_axis = 5;
  FanOptions fan;
  SolverOptions solver;
  RandomPairsSpec random_pairs;

  std::vector<TaskSpec> tasks;

  const Vec& resolve_point(const std::string& name) const;
  std::pair<Vec, Vec> resolve_pair(const std::string& name) const;
};

// The 8 task names in their stable listing order.
const std::vector<std::string>& task_names();

Scenario parse_scenario_file(const std::string& path);
Scenario parse_scenario_text(const std::string& text);

}  // namespace finlab

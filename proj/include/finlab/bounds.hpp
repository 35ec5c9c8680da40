#pragma once

#include <limits>
#include <string>
#include <utility>

#include "finlab/geodesics.hpp"
#include "finlab/soliton.hpp"

namespace finlab {

struct FanOptions {
  int fan_directions = 0;   // 0 -> 16 (n=2) / 64 (n=3)
  int radial_samples = 6;   // points per fan ray (open ball, radius fixed at 1)
  int indicatrix_dirs = 16; // directions per sampled point
  double safety_factor = 1.05;
  StepControl step{.step = 2e-3};
  CurvatureOptions curvature;
  unsigned threads = 1;
};

// Points of the forward and backward unit balls reached by geodesic fans.
struct BallSample {
  Vec center;
  std::vector<Vec> forward;
  std::vector<Vec> backward;
  int fan_directions = 0;
  int radial_samples = 0;
};

BallSample ball_sample(const MetricModel& m, const Vec& p, const FanOptions& opts = {});

// H_p: sampled estimate of sup |ric| over the union of the unit balls at p,
// maximized over indicatrix directions.
struct LocalRicciSup {
  double raw = 0.0;        // plain sampled maximum
  double value = 0.0;      // raw * safety_factor, used by the diameter bound
  double safety_factor = 1.0;
  int points_sampled = 0;
  int indicatrix_dirs = 0;
};

LocalRicciSup local_ricci_sup(const MetricModel& m, const Vec& p, const FanOptions& opts = {});

struct LemmaReport {
  Vec p, q;
  double r = 0.0;              // measured distance
  bool applicable = false;     // requires r > 1
  bool distance_converged = false;
  double integral = 0.0;       // int ric ds along the minimal geodesic found
  double integral_error = 0.0;
  double h_p = 0.0, h_q = 0.0; // raw sup estimates (no safety factor)
  double rhs = 0.0;            // 2(n-1) + H_p + H_q
  bool holds = false;
  std::string note;            // minimality caveat
};

LemmaReport lemma_check(const MetricModel& m, const Vec& p, const Vec& q,
                        const FanOptions& fan = {}, const SolverOptions& solver = {});

struct BoundReport {
  Vec p, q;
  double h_p = 0.0, h_q = 0.0;      // safety-factored sup estimates
  double v_norm_p = 0.0, v_norm_q = 0.0;
  double lambda = 0.0;
  int n = 0;
  double bound = 0.0;               // max{1, (2(n-1)+H_p+H_q+||V||_p+||V||_q)/lambda}
  double measured_distance = 0.0;
  bool distance_converged = false;
  bool holds = false;
  int fan_directions = 0, radial_samples = 0, indicatrix_dirs = 0;
  std::string note;
};

struct FieldNormOptions {
  int grid = 256;          // indicatrix directions scanned
  int refine_iters = 40;   // local refinement steps around the best direction
};

// ||V||_x = max over the indicatrix of sqrt(g_{ij}(x,y) V^i V^j).
struct FieldNormResult {
  double value = 0.0;
  int grid = 0;
  int refinement_level = 0;
};

FieldNormResult field_norm(const MetricModel& m, const VectorFieldModel& field,
                           const Vec& x, const FieldNormOptions& opts = {});

// Diameter bound for one pair. Throws HypothesisViolatedError when
// lambda <= 0 or the soliton inequality fails on the sample plan.
BoundReport diameter_bound(const SolitonProblem& problem, const Vec& p, const Vec& q,
                          const FanOptions& fan = {}, const SolverOptions& solver = {},
                          const SolitonSamplePlan* plan = nullptr);

struct SweepEntry {
  BoundReport report;
  bool ok = false;
  std::string error;  // per-pair failure, aggregated without aborting
};

struct SweepSummary {
  std::vector<SweepEntry> entries;
  int violations = 0;
  int errors = 0;
  double min_slack = std::numeric_limits<double>::infinity();  // bound - d
};

SweepSummary bound_sweep(const SolitonProblem& problem,
                         const std::vector<std::pair<Vec, Vec>>& pairs,
                         const FanOptions& fan = {}, const SolverOptions& solver = {},
                         unsigned threads = 1);

}  // namespace finlab

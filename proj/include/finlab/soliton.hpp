#pragma once

#include "finlab/curvature.hpp"
#include "finlab/fields.hpp"

namespace finlab {

struct SolitonProblem {
  MetricModel metric;
  VectorFieldModel field;
  double lambda = 0.0;
};

// Complete lift of V at (x,y): horizontal part v^i(x), vertical part
// y^j dv^i/dx^j.
struct CompleteLift {
  Vec horizontal;
  Vec vertical;
};

CompleteLift complete_lift(const VectorFieldModel& field, const PointDirection& pd);

// L_{V-hat} F^2 by the connection-free complete-lift route (primary path).
double lie_derivative_F2(const MetricModel& m, const VectorFieldModel& field,
                         const PointDirection& pd, const DiffPolicy& pol = {});

// L_{V-hat} g_jk by the covariant route: grad_j V_k + grad_k V_j
// + 2 (grad_0 V^l) C_ljk with the horizontal Chern coefficients (cross-check).
Mat lie_derivative_metric(const MetricModel& m, const VectorFieldModel& field,
                          const PointDirection& pd, const CurvatureOptions& opts = {});

// 2 F^2 ric + L F^2 - 2 lambda F^2; 2-homogeneous, so evaluated on the
// indicatrix in practice.
double soliton_residual(const SolitonProblem& problem, const PointDirection& pd,
                        const CurvatureOptions& opts = {});

enum class SolitonClass { Shrinking, Steady, Expanding, InequalityOnly, NotSatisfied };

std::string to_string(SolitonClass c);

struct SolitonSamplePlan {
  std::vector<Vec> points;
  int directions = 16;
  double tol_factor = 1e-5;  // equality tolerance = tol_factor * max(1, |lambda|)

  static SolitonSamplePlan grid(const MetricModel& m, int per_axis = 5, int directions = 16);
};

struct SolitonVerdict {
  double max_abs_residual = 0.0;
  double max_deficit = 0.0;  // positive part of 2 lambda F^2 - 2 F^2 ric - L F^2
  SolitonClass classification = SolitonClass::NotSatisfied;
  bool equality = false;
  bool inequality = false;  // 2 F^2 ric + L F^2 >= 2 lambda F^2 on all samples
  double tolerance = 0.0;
  double lambda = 0.0;
  int sample_count = 0;
  Vec witness_point;  // where |residual| peaks
  Vec witness_dir;
};

SolitonVerdict classify(const SolitonProblem& problem, const SolitonSamplePlan& plan,
                        const CurvatureOptions& opts = {}, unsigned threads = 1);

}  // namespace finlab

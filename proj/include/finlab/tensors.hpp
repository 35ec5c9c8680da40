#pragma once

#include <vector>

#include "finlab/metric.hpp"

namespace finlab {

// A chart point with a nonzero tangent vector: the argument of every tensor
// evaluation.
struct PointDirection {
  Vec x;
  Vec y;
};

struct FundamentalTensor {
  Mat g;
  PointDirection base;
};

struct CartanTensor {
  Ten3 c;  // totally symmetric
  PointDirection base;
};

// Throws DomainError / DegenerateDirectionError if pd is not admissible.
void require_valid(const MetricModel& m, const PointDirection& pd);

double eval_F(const MetricModel& m, const PointDirection& pd);

// y rescaled so that F(x,y) = 1.
Vec normalize_direction(const MetricModel& m, const Vec& x, const Vec& y);

FundamentalTensor fundamental_tensor(const MetricModel& m, const PointDirection& pd);
CartanTensor cartan_tensor(const MetricModel& m, const PointDirection& pd);
Mat inverse_fundamental(const MetricModel& m, const PointDirection& pd);

// ---------------------------------------------------------------------------
// Structure-axiom verification
// ---------------------------------------------------------------------------

struct SamplePlan {
  std::vector<Vec> points;                    // explicit chart points
  int directions = 32;                        // indicatrix directions per point
  std::vector<double> lambdas = {0.5, 2.0, 7.0};

  static SamplePlan grid(const MetricModel& m, int per_axis = 5, int directions = 32);
};

struct StructureReport {
  double max_homogeneity_violation = 0.0;  // |F(x,ly) - l F(x,y)| / (1 + l F)
  double min_hessian_eigenvalue = 0.0;
  double max_energy_mismatch = 0.0;  // |g_ij y^i y^j - F^2| / F^2
  bool positivity_ok = true;
  bool homogeneity_ok = true;
  bool convexity_ok = true;
  int samples = 0;
  Vec convexity_witness;  // point of minimal eigenvalue
  Vec convexity_witness_dir;

  bool pass() const { return positivity_ok && homogeneity_ok && convexity_ok; }
};

StructureReport verify_structure(const MetricModel& m, const SamplePlan& plan);

}  // namespace finlab

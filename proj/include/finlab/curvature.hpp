#pragma once

#include "finlab/tensors.hpp"

namespace finlab {

struct CurvatureOptions {
  // Scale of the outer x-difference step used for dG/dx and dN/dx in the
  // reduced curvature tensor; <= 0 selects a default based on whether the
  // family has analytic dg/dx (cbrt(eps)) or relies on inner differences (5e-4).
  double x_step = -1.0;
  DiffPolicy diff;

  double resolve_step(const MetricModel& m) const {
    if (x_step > 0.0) return x_step;
    return has_analytic_dgdx(m) ? diff.x_step : diff.x_step_derived;
  }
};

// Spray coefficients with their first and second y-derivatives.
// G is positively 2-homogeneous, N^i_j = dG^i/dy^j is 1-homogeneous, and
// G^i = (1/2) N^i_j y^j.
struct SprayData {
  Vec G;      // n
  Mat N;      // N(i,j) = dG^i/dy^j
  Ten3 Gyy;   // Gyy(i,j,k) = d^2 G^i / dy^j dy^k
  PointDirection base;
};

// Reduced curvature R^i_k (with the 1/F^2 factor built in) and its trace.
struct CurvatureData {
  Mat R;
  double ric = 0.0;
  PointDirection base;
};

// Horizontal (Chern) connection coefficients at a point-direction.
struct HorizontalCoefficients {
  Ten3 gamma;  // Gamma^i_jk, symmetric in j,k
  PointDirection base;
};

// Formal Christoffel symbols gamma^i_jk of the fundamental tensor.
Ten3 christoffel(const MetricModel& m, const PointDirection& pd,
                 const CurvatureOptions& opts = {});

SprayData spray_coefficients(const MetricModel& m, const PointDirection& pd,
                             const CurvatureOptions& opts = {});

// Spray vector G^i alone (the geodesic right-hand side); cheaper than the
// full SprayData.
Vec spray_vector(const MetricModel& m, const Vec& x, const Vec& y,
                 const CurvatureOptions& opts = {});

CurvatureData reduced_curvature(const MetricModel& m, const PointDirection& pd,
                                const CurvatureOptions& opts = {});

double ricci_scalar(const MetricModel& m, const PointDirection& pd,
                    const CurvatureOptions& opts = {});

HorizontalCoefficients chern_coefficients(const MetricModel& m, const PointDirection& pd,
                                          const CurvatureOptions& opts = {});

}  // namespace finlab

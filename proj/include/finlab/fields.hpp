#pragma once

#include "finlab/common.hpp"

namespace finlab {

// Soliton candidate fields. Every built-in family is affine, V(x) = A x + c,
// which keeps the spatial Jacobian exact.
struct VectorFieldModel {
  enum class Family { Zero, Linear, Radial, Rotation, GradQuadratic };

  Family family = Family::Zero;
  Mat A;
  Vec c;

  Vec eval(const Vec& x) const { return A * x + c; }
  const Mat& jacobian() const { return A; }
  std::string family_name() const;

  static VectorFieldModel zero(int n);
  static VectorFieldModel linear(Mat A, Vec c);
  static VectorFieldModel radial(int n, double kappa);
  // n=2: rate omega -> V = omega(-x2, x1); n=3: axis with |axis| the rate.
  static VectorFieldModel rotation(const Vec& axis_or_rate, int n);
  static VectorFieldModel grad_quadratic(Mat q);  // V = Q x, Q symmetric
};

}  // namespace finlab

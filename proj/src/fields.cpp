#include "finlab/fields.hpp"

namespace finlab {

std::string VectorFieldModel::family_name() const {
  switch (family) {
    case Family::Zero: return "zero";
    case Family::Linear: return "linear";
    case Family::Radial: return "radial";
    case Family::Rotation: return "rotation";
    case Family::GradQuadratic: return "grad-quadratic";
  }
  return "?";
}

VectorFieldModel VectorFieldModel::zero(int n) {
  VectorFieldModel f;
  f.family = Family::Zero;
  f.A = Mat::Zero(n, n);
  f.c = Vec::Zero(n);
  return f;
}

VectorFieldModel VectorFieldModel::linear(Mat A, Vec c) {
  if (A.rows() != A.cols() || A.rows() != c.size())
    throw InvalidModelError("linear field: dimension mismatch");
  VectorFieldModel f;
  f.family = Family::Linear;
  f.A = std::move(A);
  f.c = std::move(c);
  return f;
}

VectorFieldModel VectorFieldModel::radial(int n, double kappa) {
  VectorFieldModel f;
  f.family = Family::Radial;
  f.A = kappa * Mat::Identity(n, n);
  f.c = Vec::Zero(n);
  return f;
}

VectorFieldModel VectorFieldModel::rotation(const Vec& axis_or_rate, int n) {
  VectorFieldModel f;
  f.family = Family::Rotation;
  f.c = Vec::Zero(n);
  if (n == 2) {
    if (axis_or_rate.size() != 1) throw InvalidModelError("rotation: n=2 takes a single rate");
    double w = axis_or_rate[0];
    f.A = Mat(2, 2);
    f.A << 0.0, -w, w, 0.0;
  } else if (n == 3) {
    if (axis_or_rate.size() != 3) throw InvalidModelError("rotation: n=3 takes an axis vector");
    const Vec& w = axis_or_rate;
    f.A = Mat(3, 3);
    f.A << 0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0;
  } else {
    throw InvalidModelError("rotation fields are defined for n <= 3");
  }
  return f;
}

VectorFieldModel VectorFieldModel::grad_quadratic(Mat q) {
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidModelError("grad-quadratic field: Q must be symmetric");
  VectorFieldModel f;
  f.family = Family::GradQuadratic;
  f.c = Vec::Zero(q.rows());
  f.A = std::move(q);
  return f;
}

}  // namespace finlab

#include "finlab/chart.hpp"

namespace finlab {

ChartDomain ChartDomain::all_space(int n, double margin) {
  ChartDomain d;
  d.n = n;
  d.shape = ChartShape::AllSpace;
  d.margin = margin;
  return d;
}

ChartDomain ChartDomain::open_ball(int n, double radius, double margin) {
  if (radius <= 0.0) throw InvalidModelError("open_ball: radius must be positive");
  ChartDomain d;
  d.n = n;
  d.shape = ChartShape::OpenBall;
  d.radius = radius;
  d.margin = margin;
  return d;
}

ChartDomain ChartDomain::open_box(const Vec& lo, const Vec& hi, double margin) {
  if (lo.size() != hi.size() || lo.size() < 2)
    throw InvalidModelError("open_box: bounds must agree and n >= 2");
  for (int i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw InvalidModelError("open_box: lo < hi required per axis");
  ChartDomain d;
  d.n = static_cast<int>(lo.size());
  d.shape = ChartShape::OpenBox;
  d.lo = lo;
  d.hi = hi;
  d.margin = margin;
  return d;
}

bool ChartDomain::contains(const Vec& x) const {
  if (x.size() != n) return false;
  switch (shape) {
    case ChartShape::AllSpace:
      return x.allFinite();
    case ChartShape::OpenBall:
      return x.allFinite() && x.norm() < radius - margin;
    case ChartShape::OpenBox:
      for (int i = 0; i < n; ++i)
        if (!(x[i] > lo[i] + margin && x[i] < hi[i] - margin)) return false;
      return true;
  }
  return false;
}

}  // namespace finlab

#pragma once

#include "finlab/common.hpp"

namespace finlab {

enum class ChartShape { AllSpace, OpenBall, OpenBox };

// A single coordinate chart: an open subset of R^n with one coordinate system.
// `covers_manifold` records whether the chart is the whole manifold (Euclidean
// space, the Funk ball) or a window into a larger one (truncated stereographic
// sphere chart); ball sampling treats boundary truncation differently in the
// two cases.
struct ChartDomain {
  int n = 2;
  ChartShape shape = ChartShape::AllSpace;
  double radius = 0.0;  // OpenBall
  Vec lo, hi;           // OpenBox
  double margin = 1e-9;
  bool covers_manifold = true;

  static ChartDomain all_space(int n, double margin = 1e-9);
  static ChartDomain open_ball(int n, double radius, double margin = 1e-9);
  static ChartDomain open_box(const Vec& lo, const Vec& hi, double margin = 1e-9);

  // Strict interior test; points within `margin` of the boundary are rejected.
  bool contains(const Vec& x) const;
};

}  // namespace finlab

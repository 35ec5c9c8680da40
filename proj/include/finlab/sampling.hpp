#pragma once

#include <vector>

#include "finlab/common.hpp"
#include "finlab/rng.hpp"

namespace finlab {

// Euclidean direction grids used for indicatrix sampling. For n=2 the grids
// are nested under count doubling (angles k*2pi/m starting at 0), which the
// sup estimators rely on for their monotonicity property.
std::vector<Vec> direction_grid(int n, int count);

// Fibonacci sphere lattice (n=3).
std::vector<Vec> fibonacci_sphere(int count);

// Regular grid of chart points inside [lo, hi], per-axis count.
std::vector<Vec> point_grid(const Vec& lo, const Vec& hi, int per_axis);

}  // namespace finlab

#include "finlab/sampling.hpp"

#include <cmath>

namespace finlab {

std::vector<Vec> fibonacci_sphere(int count) {
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<size_t>(count));
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int i = 0; i < count; ++i) {
    double z = 1.0 - (2.0 * i + 1.0) / count;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = 2.0 * M_PI * static_cast<double>(i) / golden;
    Vec v(3);
    v << r * std::cos(phi), r * std::sin(phi), z;
    dirs.push_back(std::move(v));
  }
  return dirs;
}

std::vector<Vec> direction_grid(int n, int count) {
  std::vector<Vec> dirs;
  if (n == 2) {
    dirs.reserve(static_cast<size_t>(count));
    for (int k = 0; k < count; ++k) {
      double th = 2.0 * M_PI * k / count;
      Vec v(2);
      v << std::cos(th), std::sin(th);
      dirs.push_back(std::move(v));
    }
    return dirs;
  }
  if (n == 3) return fibonacci_sphere(count);
  Rng rng(0x5eed0000u + static_cast<uint64_t>(count));
  dirs.reserve(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) dirs.push_back(rng.unit_vector(n));
  return dirs;
}

std::vector<Vec> point_grid(const Vec& lo, const Vec& hi, int per_axis) {
  const int n = static_cast<int>(lo.size());
  std::vector<Vec> pts;
  std::vector<int> idx(static_cast<size_t>(n), 0);
  Vec x(n);
  while (true) {
    for (int i = 0; i < n; ++i) {
      double t = (per_axis == 1) ? 0.5 : static_cast<double>(idx[static_cast<size_t>(i)]) / (per_axis - 1);
      x[i] = lo[i] + t * (hi[i] - lo[i]);
    }
    pts.push_back(x);
    int c = 0;
    while (c < n && ++idx[static_cast<size_t>(c)] == per_axis) idx[static_cast<size_t>(c++)] = 0;
    if (c == n) break;
  }
  return pts;
}

}  // namespace finlab

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "finlab/common.hpp"

namespace finlab {

// Deterministic RNG: raw mt19937_64 bits mapped to doubles by hand so that
// sequences do not depend on library distribution internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller (always consumes two uniforms)
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // uniformly distributed Euclidean unit vector
  Vec unit_vector(int n) {
    Vec v(n);
    double norm2 = 0.0;
    do {
      for (int i = 0; i < n; ++i) v[i] = normal();
      norm2 = v.squaredNorm();
    } while (norm2 < 1e-12);
    return v / std::sqrt(norm2);
  }

  // uniform point in the Euclidean ball of given radius
  Vec ball_point(int n, double radius) {
    Vec u = unit_vector(n);
    double r = radius * std::pow(uniform(), 1.0 / n);
    return r * u;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace finlab

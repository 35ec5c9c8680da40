#pragma once

#include <functional>
#include <vector>

namespace finlab {

// Integrate tabulated samples (s_i, f_i) by piecewise-quadratic (Simpson-type)
// rules; tolerates the non-uniform tail the fixed-step integrator leaves.
double integrate_samples(const std::vector<double>& s, const std::vector<double>& f);

// Composite Simpson of a callable on [a, b] with m subintervals (m rounded up
// to even).
double simpson(const std::function<double(double)>& fn, double a, double b, int m);

}  // namespace finlab

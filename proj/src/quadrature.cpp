#include "finlab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace finlab {

namespace {

// Exact integral over [x0, x2] of the quadratic through three points.
double quad_through(double x0, double f0, double x1, double f1, double x2, double f2,
                    double lo, double hi) {
  // Lagrange basis integrated on [lo, hi]
  auto basis_integral = [&](double a, double b, double c) {
    // integral of (x-b)(x-c) / ((a-b)(a-c)) over [lo, hi]
    double denom = (a - b) * (a - c);
    auto antideriv = [&](double x) {
      return x * x * x / 3.0 - (b + c) * x * x / 2.0 + b * c * x;
    };
    return (antideriv(hi) - antideriv(lo)) / denom;
  };
  return f0 * basis_integral(x0, x1, x2) + f1 * basis_integral(x1, x0, x2) +
         f2 * basis_integral(x2, x0, x1);
}

}  // namespace

double integrate_samples(const std::vector<double>& s_in, const std::vector<double>& f_in) {
  if (s_in.size() != f_in.size()) throw std::invalid_argument("integrate_samples: size mismatch");
  if (s_in.size() < 2) return 0.0;

  // merge abscissae that nearly coincide: the quadratic weights divide by the
  // node gaps
  double span = std::abs(s_in.back() - s_in.front());
  std::vector<double> s{s_in.front()}, f{f_in.front()};
  for (size_t i = 1; i < s_in.size(); ++i) {
    if (std::abs(s_in[i] - s.back()) > 1e-9 * std::max(1.0, span)) {
      s.push_back(s_in[i]);
      f.push_back(f_in[i]);
    }
  }
  const size_t n = s.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * (f[0] + f[1]) * (s[1] - s[0]);

  double total = 0.0;
  size_t i = 0;
  while (i + 2 < n) {
    total += quad_through(s[i], f[i], s[i + 1], f[i + 1], s[i + 2], f[i + 2], s[i], s[i + 2]);
    i += 2;
  }
  if (i + 1 < n) {
    // one interval left: quadratic through the last three points, integrated
    // over the final subinterval only
    total += quad_through(s[n - 3], f[n - 3], s[n - 2], f[n - 2], s[n - 1], f[n - 1],
                          s[n - 2], s[n - 1]);
  }
  return total;
}

double simpson(const std::function<double(double)>& fn, double a, double b, int m) {
  if (b == a) return 0.0;
  if (m < 2) m = 2;
  if (m % 2 != 0) ++m;
  double h = (b - a) / m;
  double acc = fn(a) + fn(b);
  for (int i = 1; i < m; ++i) acc += fn(a + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
  return acc * h / 3.0;
}

}  // namespace finlab

#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "finlab/chart.hpp"
#include "finlab/common.hpp"
#include "finlab/dual.hpp"
#include "finlab/galg.hpp"

namespace finlab {

// ---------------------------------------------------------------------------
// Riemannian coefficient models a_ij(x)
// ---------------------------------------------------------------------------

struct ConstantMatrix {
  Mat a;  // symmetric positive definite
};

// Round unit sphere in one stereographic chart: a_ij = 4 delta_ij / (1+|x|^2)^2.
struct SphereStereographic {};

using AMatrixModel = std::variant<ConstantMatrix, SphereStereographic>;

Mat a_matrix_at(const AMatrixModel& m, const Vec& x);
Mat a_matrix_dx(const AMatrixModel& m, const Vec& x, int k);  // d a_ij / d x^k

// ---------------------------------------------------------------------------
// Metric families
// ---------------------------------------------------------------------------

struct EuclideanParams {};

struct RiemannianParams {
  AMatrixModel a;
};

// Randers metric F = sqrt(y a y) + b(x).y with the affine one-form
// b(x) = b0 + blin x (blin may be zero).
struct RandersParams {
  AMatrixModel a;
  Vec b0;
  Mat blin;
};

// Funk metric of the unit ball.
struct FunkParams {};

using FamilyParams =
    std::variant<EuclideanParams, RiemannianParams, RandersParams, FunkParams>;

struct MetricOptions {
  bool validate = true;           // Randers construction check of ||b||_a
  int validation_grid = 9;        // samples per axis
  double randers_threshold = 1.0 - 1e-6;
};

// A Finsler structure on a single chart, declared from a built-in family.
// Immutable after construction; freely copyable and shareable across threads.
struct MetricModel {
  ChartDomain domain;
  FamilyParams family;
  bool reversed = false;  // evaluate F(x,-y): realizes backward balls as forward ones

  int dim() const { return domain.n; }
  std::string family_name() const;

  static MetricModel euclidean(int n);
  static MetricModel riemannian(ChartDomain domain, AMatrixModel a);
  // Stereographic chart of the round unit sphere, truncated to |x| <= r_max.
  static MetricModel sphere(int n, double r_max = 20.0);
  static MetricModel randers(ChartDomain domain, AMatrixModel a, Vec b0,
                             Mat blin = Mat(), MetricOptions opts = {});
  static MetricModel funk(int n);
};

// F(x,-y) as a model; applying twice restores the original.
MetricModel reverse_metric(const MetricModel& m);

// F with its sign: for a valid structure this equals sqrt(F^2), but for an
// invalid Randers declaration (||b||_a >= 1) it goes negative where the axiom
// fails, which F^2 alone cannot reveal.
double f_signed(const MetricModel& m, const Vec& x, const Vec& y);

// Largest ||b(x)||_a found on the validation grid (Randers only).
double randers_max_b_norm(const MetricModel& m, int grid_per_axis = 9);

// ---------------------------------------------------------------------------
// Differentiation engine policy
// ---------------------------------------------------------------------------
//
// y-derivatives are exact (nested forward duals). x-derivatives use analytic
// family formulas when available and central differences otherwise; the step
// scales with the coordinate magnitude.

struct DiffPolicy {
  double x_step = 6.0554544523933395e-06;  // cbrt(machine epsilon)
  // Outer-difference step used by curvature when the family lacks analytic
  // dg/dx and inner differences leave a noise floor.
  double x_step_derived = 5e-4;

  static double step(double scale, double coord) {
    return scale * std::max(1.0, std::abs(coord));
  }
};

namespace detail {

template <class T>
T f2_euclidean(const VecT<T>& y) {
  T s(0.0);
  for (const T& yi : y) s += yi * yi;
  return s;
}

template <class T>
T quad_form(const Mat& a, const VecT<T>& y) {
  const int n = static_cast<int>(y.size());
  T s(0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s += a(i, j) * y[static_cast<size_t>(i)] * y[static_cast<size_t>(j)];
  }
  return s;
}

template <class T>
T f2_funk(const Vec& x, const VecT<T>& y) {
  const int n = static_cast<int>(y.size());
  double x2 = x.squaredNorm();
  T y2(0.0), w(0.0);
  for (int i = 0; i < n; ++i) {
    y2 += y[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
    w += x[i] * y[static_cast<size_t>(i)];
  }
  T root = sqrt((1.0 - x2) * y2 + w * w);
  T f = (root + w) / (1.0 - x2);
  return f * f;
}

}  // namespace detail

// F^2(x, y) with y over an arbitrary dual scalar; x stays double (x-derivatives
// are the engine's business, not the family's).
template <class T>
T f2_eval(const MetricModel& m, const Vec& x, const VecT<T>& y_in) {
  VecT<T> y = y_in;
  if (m.reversed) {
    for (T& yi : y) yi = -yi;
  }
  if (std::holds_alternative<EuclideanParams>(m.family)) {
    return detail::f2_euclidean(y);
  }
  if (const auto* r = std::get_if<RiemannianParams>(&m.family)) {
    return detail::quad_form(a_matrix_at(r->a, x), y);
  }
  if (const auto* r = std::get_if<RandersParams>(&m.family)) {
    T alpha2 = detail::quad_form(a_matrix_at(r->a, x), y);
    Vec b = r->b0;
    if (r->blin.size() > 0) b += r->blin * x;
    T beta(0.0);
    for (int i = 0; i < m.dim(); ++i) beta += b[i] * y[static_cast<size_t>(i)];
    T f = sqrt(alpha2) + beta;
    return f * f;
  }
  return detail::f2_funk(x, std::move(y));
}

// dF^2/dy^k, exact via one dual level on top of T.
template <class T>
T f2_dy(const MetricModel& m, const Vec& x, const VecT<T>& y, int k) {
  VecT<Dual<T>> yd(y.size());
  for (size_t i = 0; i < y.size(); ++i) yd[i] = Dual<T>(y[i], T(i == static_cast<size_t>(k) ? 1.0 : 0.0));
  return f2_eval(m, x, yd).d;
}

// g_ij = [F^2/2]_{y^i y^j} over an arbitrary base scalar.
template <class T>
MatT<T> metric_tensor_eval(const MetricModel& m, const Vec& x, const VecT<T>& y) {
  const int n = m.dim();
  MatT<T> g(n);
  using DD = Dual<Dual<T>>;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      VecT<DD> yd(static_cast<size_t>(n));
      for (int k = 0; k < n; ++k) {
        Dual<T> inner(y[static_cast<size_t>(k)], T(k == j ? 1.0 : 0.0));
        Dual<T> seed(T(k == i ? 1.0 : 0.0), T(0.0));
        yd[static_cast<size_t>(k)] = DD(inner, seed);
      }
      T gij = f2_eval(m, x, yd).d.d * 0.5;
      g(i, j) = gij;
      if (j != i) g(j, i) = gij;
    }
  }
  return g;
}

// True when dg/dx is available in closed form for this model.
bool has_analytic_dgdx(const MetricModel& m);
bool has_analytic_df2dx(const MetricModel& m);

// dg_ij/dx^k over an arbitrary base scalar, using the family's analytic data
// when present and central differences otherwise.
template <class T>
MatT<T> metric_tensor_dx(const MetricModel& m, const Vec& x, const VecT<T>& y_in,
                         int k, const DiffPolicy& pol = {}) {
  const int n = m.dim();
  VecT<T> y = y_in;
  if (m.reversed) {
    for (T& yi : y) yi = -yi;
  }
  // Work against the unreversed family below (g~(x,y) = g(x,-y), even in y).
  MetricModel base = m;
  base.reversed = false;

  if (std::holds_alternative<EuclideanParams>(base.family)) return MatT<T>(n);
  if (const auto* r = std::get_if<RiemannianParams>(&base.family)) {
    Mat da = a_matrix_dx(r->a, x, k);
    MatT<T> out(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) = T(da(i, j));
    return out;
  }
  if (const auto* r = std::get_if<RandersParams>(&base.family)) {
    bool a_const = std::holds_alternative<ConstantMatrix>(r->a);
    bool b_const = r->blin.size() == 0 || r->blin.cwiseAbs().maxCoeff() == 0.0;
    if (a_const && b_const) return MatT<T>(n);
    // fall through to central differences
  }
  if (std::holds_alternative<FunkParams>(base.family)) {
    // Funk PDE F_{x^k} = F F_{y^k} gives dF^2/dx^k = F dF^2/dy^k; dg/dx^k is
    // half the y-Hessian of that product, exact via duals.
    using DD = Dual<Dual<T>>;
    MatT<T> out(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        VecT<DD> yd(static_cast<size_t>(n));
        for (int p = 0; p < n; ++p) {
          Dual<T> inner(y[static_cast<size_t>(p)], T(p == j ? 1.0 : 0.0));
          Dual<T> seed(T(p == i ? 1.0 : 0.0), T(0.0));
          yd[static_cast<size_t>(p)] = DD(inner, seed);
        }
        DD f2 = f2_eval(base, x, yd);
        DD w = sqrt(f2) * f2_dy(base, x, yd, k);
        T v = w.d.d * 0.5;
        out(i, j) = v;
        if (j != i) out(j, i) = v;
      }
    }
    return out;
  }

  // Central differences in x of the dual-computed tensor.
  double h = DiffPolicy::step(pol.x_step, x[k]);
  Vec xp = x, xm = x;
  xp[k] += h;
  xm[k] -= h;
  MatT<T> gp = metric_tensor_eval(base, xp, y);
  MatT<T> gm = metric_tensor_eval(base, xm, y);
  MatT<T> out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = (gp(i, j) - gm(i, j)) / (2.0 * h);
  return out;
}

// dF^2/dx^k over an arbitrary base scalar.
template <class T>
T f2_dx(const MetricModel& m, const Vec& x, const VecT<T>& y_in, int k,
        const DiffPolicy& pol = {}) {
  VecT<T> y = y_in;
  if (m.reversed) {
    for (T& yi : y) yi = -yi;
  }
  MetricModel base = m;
  base.reversed = false;

  if (std::holds_alternative<EuclideanParams>(base.family)) return T(0.0);
  if (const auto* r = std::get_if<RiemannianParams>(&base.family)) {
    Mat da = a_matrix_dx(r->a, x, k);
    return detail::quad_form(da, y);
  }
  if (const auto* r = std::get_if<RandersParams>(&base.family)) {
    Mat a = a_matrix_at(r->a, x);
    Mat da = a_matrix_dx(r->a, x, k);
    Vec b = r->b0;
    if (r->blin.size() > 0) b += r->blin * x;
    T alpha2 = detail::quad_form(a, y);
    T alpha = sqrt(alpha2);
    T dalpha = detail::quad_form(da, y) / (2.0 * alpha);
    T beta(0.0), dbeta(0.0);
    for (int i = 0; i < base.dim(); ++i) {
      beta += b[i] * y[static_cast<size_t>(i)];
      if (r->blin.size() > 0) dbeta += r->blin(i, k) * y[static_cast<size_t>(i)];
    }
    return 2.0 * (alpha + beta) * (dalpha + dbeta);
  }
  if (std::holds_alternative<FunkParams>(base.family)) {
    return sqrt(f2_eval(base, x, y)) * f2_dy(base, x, y, k);
  }
  double h = DiffPolicy::step(pol.x_step, x[k]);
  Vec xp = x, xm = x;
  xp[k] += h;
  xm[k] -= h;
  return (f2_eval(base, xp, y) - f2_eval(base, xm, y)) / (2.0 * h);
}

}  // namespace finlab

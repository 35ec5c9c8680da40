#include "finlab/curvature.hpp"

namespace finlab {

namespace {

// gamma^i_jk = g^{is} (d_k g_sj - d_s g_jk + d_j g_ks) / 2 over a generic
// scalar; the workhorse behind the spray and everything above it.
template <class T>
Ten3T<T> christoffel_eval(const MetricModel& m, const Vec& x, const VecT<T>& y,
                          const DiffPolicy& pol) {
  const int n = m.dim();
  MatT<T> g = metric_tensor_eval(m, x, y);
  MatT<T> ginv = inverse(g);
  std::vector<MatT<T>> dg;
  dg.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) dg.push_back(metric_tensor_dx(m, x, y, k, pol));

  Ten3T<T> gamma(n);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      VecT<T> rhs(static_cast<size_t>(n), T(0.0));
      for (int s = 0; s < n; ++s)
        rhs[static_cast<size_t>(s)] =
            (dg[static_cast<size_t>(k)](s, j) - dg[static_cast<size_t>(s)](j, k) +
             dg[static_cast<size_t>(j)](k, s)) * 0.5;
      for (int i = 0; i < n; ++i) {
        T v(0.0);
        for (int s = 0; s < n; ++s) v += ginv(i, s) * rhs[static_cast<size_t>(s)];
        gamma(i, j, k) = v;
        if (k != j) gamma(i, k, j) = v;
      }
    }
  }
  return gamma;
}

// G^i = (1/2) gamma^i_jk y^j y^k, assembled without materializing gamma:
// rhs_s = (d_k g_sj) y^j y^k - (1/2)(d_s g_jk) y^j y^k, then G = (1/2) g^{-1} rhs.
template <class T>
VecT<T> spray_eval(const MetricModel& m, const Vec& x, const VecT<T>& y,
                   const DiffPolicy& pol) {
  const int n = m.dim();
  MatT<T> g = metric_tensor_eval(m, x, y);
  MatT<T> ginv = inverse(g);
  VecT<T> rhs(static_cast<size_t>(n), T(0.0));
  for (int k = 0; k < n; ++k) {
    MatT<T> dgk = metric_tensor_dx(m, x, y, k, pol);
    for (int s = 0; s < n; ++s) {
      T acc(0.0);
      for (int j = 0; j < n; ++j) acc += dgk(s, j) * y[static_cast<size_t>(j)];
      rhs[static_cast<size_t>(s)] += acc * y[static_cast<size_t>(k)];
      // second term: -(1/2) (d_s g_jk) y^j y^k, accumulated when k plays s
    }
    T quad(0.0);
    for (int a = 0; a < n; ++a) {
      T row(0.0);
      for (int b = 0; b < n; ++b) row += dgk(a, b) * y[static_cast<size_t>(b)];
      quad += row * y[static_cast<size_t>(a)];
    }
    rhs[static_cast<size_t>(k)] = rhs[static_cast<size_t>(k)] - 0.5 * quad;
  }
  VecT<T> G(static_cast<size_t>(n), T(0.0));
  for (int i = 0; i < n; ++i) {
    T v(0.0);
    for (int s = 0; s < n; ++s) v += ginv(i, s) * rhs[static_cast<size_t>(s)];
    G[static_cast<size_t>(i)] = 0.5 * v;
  }
  return G;
}

Vec spray_plain(const MetricModel& m, const Vec& x, const Vec& y, const DiffPolicy& pol) {
  VecT<double> G = spray_eval(m, x, toVecT(y), pol);
  return toEigen(G);
}

// N^i_j = dG^i/dy^j via one dual level.
Mat spray_N(const MetricModel& m, const Vec& x, const Vec& y, const DiffPolicy& pol) {
  const int n = m.dim();
  Mat N(n, n);
  using D = Dual<double>;
  for (int j = 0; j < n; ++j) {
    VecT<D> yd(static_cast<size_t>(n));
    for (int p = 0; p < n; ++p) yd[static_cast<size_t>(p)] = D(y[p], p == j ? 1.0 : 0.0);
    VecT<D> G = spray_eval(m, x, yd, pol);
    for (int i = 0; i < n; ++i) N(i, j) = G[static_cast<size_t>(i)].d;
  }
  return N;
}

Ten3 spray_Gyy(const MetricModel& m, const Vec& x, const Vec& y, const DiffPolicy& pol) {
  const int n = m.dim();
  Ten3 out(n);
  using DD = Dual<Dual<double>>;
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      VecT<DD> yd(static_cast<size_t>(n));
      for (int p = 0; p < n; ++p) {
        Dual<double> inner(y[p], p == k ? 1.0 : 0.0);
        Dual<double> seed(p == j ? 1.0 : 0.0, 0.0);
        yd[static_cast<size_t>(p)] = DD(inner, seed);
      }
      VecT<DD> G = spray_eval(m, x, yd, pol);
      for (int i = 0; i < n; ++i) {
        out(i, j, k) = G[static_cast<size_t>(i)].d.d;
        if (k != j) out(i, k, j) = out(i, j, k);
      }
    }
  }
  return out;
}

}  // namespace

Ten3 christoffel(const MetricModel& m, const PointDirection& pd, const CurvatureOptions& opts) {
  require_valid(m, pd);
  return toTen3(christoffel_eval(m, pd.x, toVecT(pd.y), opts.diff));
}

Vec spray_vector(const MetricModel& m, const Vec& x, const Vec& y, const CurvatureOptions& opts) {
  return spray_plain(m, x, y, opts.diff);
}

SprayData spray_coefficients(const MetricModel& m, const PointDirection& pd,
                             const CurvatureOptions& opts) {
  require_valid(m, pd);
  SprayData s;
  s.base = pd;
  s.G = spray_plain(m, pd.x, pd.y, opts.diff);
  s.N = spray_N(m, pd.x, pd.y, opts.diff);
  s.Gyy = spray_Gyy(m, pd.x, pd.y, opts.diff);
  return s;
}

CurvatureData reduced_curvature(const MetricModel& m, const PointDirection& pd,
                                const CurvatureOptions& opts) {
  require_valid(m, pd);
  const int n = m.dim();
  const DiffPolicy& pol = opts.diff;
  const double step_scale = opts.resolve_step(m);

  Vec G = spray_plain(m, pd.x, pd.y, pol);
  Mat N = spray_N(m, pd.x, pd.y, pol);
  Ten3 Gyy = spray_Gyy(m, pd.x, pd.y, pol);

  // Outer x-differences: dG/dx and the mixed derivative as the x-difference of
  // the dual-computed N (keeps everything exact in y).
  Mat dGdx(n, n);             // dGdx(i,k) = dG^i/dx^k
  std::vector<Mat> dNdx;      // dNdx[j](i,k) = d N^i_k / d x^j
  dNdx.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    double h = DiffPolicy::step(step_scale, pd.x[k]);
    Vec xp = pd.x, xm = pd.x;
    xp[k] += h;
    xm[k] -= h;
    Vec Gp = spray_plain(m, xp, pd.y, pol);
    Vec Gm = spray_plain(m, xm, pd.y, pol);
    dGdx.col(k) = (Gp - Gm) / (2.0 * h);
    dNdx.push_back((spray_N(m, xp, pd.y, pol) - spray_N(m, xm, pd.y, pol)) / (2.0 * h));
  }

  double f2 = f2_eval(m, pd.x, toVecT(pd.y));
  CurvatureData out;
  out.base = pd;
  out.R = Mat(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      double term = 2.0 * dGdx(i, k);
      for (int j = 0; j < n; ++j) {
        term -= dNdx[static_cast<size_t>(j)](i, k) * pd.y[j];
        term += 2.0 * G[j] * Gyy(i, j, k);
        term -= N(i, j) * N(j, k);
      }
      out.R(i, k) = term / f2;
    }
  }
  out.ric = out.R.trace();
  return out;
}

double ricci_scalar(const MetricModel& m, const PointDirection& pd,
                    const CurvatureOptions& opts) {
  return reduced_curvature(m, pd, opts).ric;
}

HorizontalCoefficients chern_coefficients(const MetricModel& m, const PointDirection& pd,
                                          const CurvatureOptions& opts) {
  require_valid(m, pd);
  const int n = m.dim();
  Ten3 gamma = toTen3(christoffel_eval(m, pd.x, toVecT(pd.y), opts.diff));
  Mat N = spray_N(m, pd.x, pd.y, opts.diff);
  Ten3 C = cartan_tensor(m, pd).c;
  Mat ginv = inverse_fundamental(m, pd);

  HorizontalCoefficients out;
  out.base = pd;
  out.gamma = Ten3(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        double corr = 0.0;
        for (int l = 0; l < n; ++l) {
          double inner = 0.0;
          for (int s = 0; s < n; ++s) {
            inner += C(l, j, s) * N(s, k) + C(l, k, s) * N(s, j) - C(j, k, s) * N(s, l);
          }
          corr += ginv(i, l) * inner;
        }
        double v = gamma(i, j, k) - corr;
        out.gamma(i, j, k) = v;
        if (k != j) out.gamma(i, k, j) = v;
      }
    }
  }
  return out;
}

}  // namespace finlab

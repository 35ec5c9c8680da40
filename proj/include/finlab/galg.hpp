#pragma once

#include <cmath>
#include <vector>

#include "finlab/common.hpp"
#include "finlab/dual.hpp"

namespace finlab {

// Minimal dense containers over a generic scalar, used inside the dual-number
// differentiation pipeline where Eigen's fixed scalar types do not apply.
template <class T>
using VecT = std::vector<T>;

template <class T>
class MatT {
 public:
  MatT() = default;
  explicit MatT(int n) : n_(n), d_(static_cast<size_t>(n) * n, T(0.0)) {}

  int dim() const { return n_; }
  T& operator()(int i, int j) { return d_[static_cast<size_t>(i) * n_ + j]; }
  const T& operator()(int i, int j) const { return d_[static_cast<size_t>(i) * n_ + j]; }

 private:
  int n_ = 0;
  std::vector<T> d_;
};

template <class T>
class Ten3T {
 public:
  Ten3T() = default;
  explicit Ten3T(int n) : n_(n), d_(static_cast<size_t>(n) * n * n, T(0.0)) {}

  int dim() const { return n_; }
  T& operator()(int i, int j, int k) { return d_[(static_cast<size_t>(i) * n_ + j) * n_ + k]; }
  const T& operator()(int i, int j, int k) const {
    return d_[(static_cast<size_t>(i) * n_ + j) * n_ + k];
  }

 private:
  int n_ = 0;
  std::vector<T> d_;
};

// Gauss-Jordan inverse with partial pivoting on |value|. Works for any dual depth.
template <class T>
MatT<T> inverse(const MatT<T>& a) {
  const int n = a.dim();
  MatT<T> m = a;
  MatT<T> inv(n);
  for (int i = 0; i < n; ++i) inv(i, i) = T(1.0);

  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(value(m(col, col)));
    for (int r = col + 1; r < n; ++r) {
      double cand = std::abs(value(m(r, col)));
      if (cand > best) {
        best = cand;
        piv = r;
      }
    }
    if (best < 1e-300) throw SingularMatrixError("matrix inverse: pivot vanished");
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(m(piv, j), m(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    }
    T diag = m(col, col);
    for (int j = 0; j < n; ++j) {
      m(col, j) = m(col, j) / diag;
      inv(col, j) = inv(col, j) / diag;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      T f = m(r, col);
      if (value(f) == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        m(r, j) = m(r, j) - f * m(col, j);
        inv(r, j) = inv(r, j) - f * inv(col, j);
      }
    }
  }
  return inv;
}

template <class T>
T dot(const VecT<T>& a, const VecT<T>& b) {
  T s(0.0);
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Eigen <-> generic bridges (double specialization)
inline VecT<double> toVecT(const Vec& x) {
  return VecT<double>(x.data(), x.data() + x.size());
}
inline Vec toEigen(const VecT<double>& x) {
  Vec v(static_cast<int>(x.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = x[static_cast<size_t>(i)];
  return v;
}
inline Mat toEigen(const MatT<double>& m) {
  Mat out(m.dim(), m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) out(i, j) = m(i, j);
  return out;
}
inline Ten3 toTen3(const Ten3T<double>& t) {
  Ten3 out(t.dim());
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j)
      for (int k = 0; k < t.dim(); ++k) out(i, j, k) = t(i, j, k);
  return out;
}

}  // namespace finlab

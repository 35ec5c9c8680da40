#pragma once

#include <cmath>
#include <type_traits>

namespace finlab {

// Forward-mode dual number over an arbitrary scalar T. Nesting Dual<Dual<...>>
// yields exact higher-order directional derivatives of closed-form expressions.
template <class T>
struct Dual {
  T v{};  // value
  T d{};  // derivative part

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value), d(0.0) {}  // NOLINT: implicit promotion of constants
  constexpr Dual(T value, T deriv) : v(std::move(value)), d(std::move(deriv)) {}
};

// value(): collapse any nesting depth to the underlying double.
inline double value(double x) { return x; }
template <class T>
double value(const Dual<T>& x) {
  return value(x.v);
}

template <class T>
constexpr Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <class T>
constexpr Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <class T>
constexpr Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <class T>
constexpr Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <class T>
constexpr Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

// double mixing
template <class T>
constexpr Dual<T> operator+(const Dual<T>& a, double b) {
  return {a.v + b, a.d};
}
template <class T>
constexpr Dual<T> operator+(double a, const Dual<T>& b) {
  return {a + b.v, b.d};
}
template <class T>
constexpr Dual<T> operator-(const Dual<T>& a, double b) {
  return {a.v - b, a.d};
}
template <class T>
constexpr Dual<T> operator-(double a, const Dual<T>& b) {
  return {a - b.v, -b.d};
}
template <class T>
constexpr Dual<T> operator*(const Dual<T>& a, double b) {
  return {a.v * b, a.d * b};
}
template <class T>
constexpr Dual<T> operator*(double a, const Dual<T>& b) {
  return {a * b.v, a * b.d};
}
template <class T>
constexpr Dual<T> operator/(const Dual<T>& a, double b) {
  return {a.v / b, a.d / b};
}
template <class T>
constexpr Dual<T> operator/(double a, const Dual<T>& b) {
  return Dual<T>(a) / b;
}

template <class T>
Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) {
  a = a + b;
  return a;
}
template <class T>
Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) {
  a = a - b;
  return a;
}
template <class T>
Dual<T>& operator*=(Dual<T>& a, const Dual<T>& b) {
  a = a * b;
  return a;
}

using std::sqrt;
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  T r = sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}

// Comparisons act on values; needed for pivoting and branch guards.
template <class T>
bool operator<(const Dual<T>& a, const Dual<T>& b) {
  return value(a) < value(b);
}
template <class T>
bool operator<(const Dual<T>& a, double b) {
  return value(a) < b;
}
template <class T>
bool operator>(const Dual<T>& a, double b) {
  return value(a) > b;
}

namespace detail {
template <class T>
struct ScalarDepth {
  static constexpr int value = 0;
};
template <class T>
struct ScalarDepth<Dual<T>> {
  static constexpr int value = 1 + ScalarDepth<T>::value;
};
}  // namespace detail

}  // namespace finlab

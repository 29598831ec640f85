// Forward-mode dual numbers. Nesting Dual<Dual<double>> yields exact second derivatives.
#pragma once

#include <cmath>

namespace oracle {

template <class T>
struct Dual {
  T v{};
  T d{};
};

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
template <class T>
Dual<T> operator*(double s, const Dual<T>& a) { return {s * a.v, s * a.d}; }
template <class T>
Dual<T> operator*(const Dual<T>& a, double s) { return s * a; }

template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.v), cos(a.v) * a.d};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.v), -1.0 * (sin(a.v) * a.d)};
}

using D2 = Dual<Dual<double>>;

// Variable i of n (value x) seeded for the mixed derivative d^2 / dx_a dx_b.
inline D2 seed(double x, int i, int a, int b) {
  return {{x, i == b ? 1.0 : 0.0}, {i == a ? 1.0 : 0.0, 0.0}};
}

}  // namespace oracle

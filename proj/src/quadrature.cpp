#include "xtpoly/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace xtpoly::quad {

std::array<double, 2> legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p0 = 1.0, p1 = x;
  double d0 = 0.0, d1 = 1.0;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    const double d2 = d0 + (2.0 * k - 1.0) * p1;
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  return {p1, d1};
}

namespace {

Rule1D compute_gauss_legendre(int n) {
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = legendre(n, x);
    r.x[n - 1 - i] = x;
    r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

Rule1D compute_gauss_lobatto(int n) {
  // Interior nodes are the roots of P'_{n-1}.
  const int N = n - 1;
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = -std::cos(std::numbers::pi * i / N);
    if (i > 0 && i < N) {
      for (int it = 0; it < 100; ++it) {
        // Newton on (1-x^2) P'_N(x) = 0; derivative of P'_N from Legendre's ODE.
        const auto [p, dp] = legendre(N, x);
        const double ddp = (2.0 * x * dp - N * (N + 1.0) * p) / (1.0 - x * x);
        const double dx = dp / ddp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
    }
    const double p = legendre(N, x)[0];
    r.x[i] = x;
    r.w[i] = 2.0 / (N * (N + 1.0) * p * p);
  }
  return r;
}

template <class F>
const Rule1D& cached(std::map<int, Rule1D>& cache, std::mutex& mtx, int n, F&& make) {
  std::lock_guard lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make(n)).first;
  return it->second;
}

}  // namespace

Rule1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  static std::map<int, Rule1D> cache;
  static std::mutex mtx;
  return cached(cache, mtx, n, compute_gauss_legendre);
}

Rule1D gauss_lobatto(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto: n must be >= 2");
  static std::map<int, Rule1D> cache;
  static std::mutex mtx;
  return cached(cache, mtx, n, compute_gauss_lobatto);
}

Rule2D triangle(const Vec2& a, const Vec2& b, const Vec2& c, int order) {
  // Duffy map from the square; the Jacobian adds one degree in the collapsed direction.
  const int n = std::max(1, (order + 2 + 1) / 2);
  const Rule1D g = gauss_legendre(n);
  const double area2 = std::abs(cross(b - a, c - a));
  Rule2D r;
  r.x.reserve(n * n);
  r.w.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (g.x[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (g.x[j] + 1.0);
      const double s = u;
      const double t = v * (1.0 - u);
      r.x.push_back(a + s * (b - a) + t * (c - a));
      r.w.push_back(0.25 * g.w[i] * g.w[j] * (1.0 - u) * area2);
    }
  }
  return r;
}

Rule2D segment(const Vec2& a, const Vec2& b, int order) {
  const int n = std::max(1, (order + 2) / 2);
  const Rule1D g = gauss_legendre(n);
  const double len = (b - a).norm();
  Rule2D r;
  for (int i = 0; i < n; ++i) {
    r.x.push_back(a + 0.5 * (g.x[i] + 1.0) * (b - a));
    r.w.push_back(0.5 * len * g.w[i]);
  }
  return r;
}

}  // namespace xtpoly::quad

#pragma once

#include "xtpoly/geometry.hpp"

#include <array>
#include <vector>

namespace xtpoly::quad {

/// Points and weights on the reference interval [-1, 1].
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule (exact to degree 2n-1).
Rule1D gauss_legendre(int n);

/// n-point Gauss-Legendre-Lobatto rule (n >= 2, exact to degree 2n-3).
Rule1D gauss_lobatto(int n);

/// Legendre polynomial P_n and its derivative at x.
std::array<double, 2> legendre(int n, double x);

/// Quadrature rule with points in physical coordinates.
struct Rule2D {
  std::vector<Vec2> x;
  std::vector<double> w;
};

/// Collapsed-coordinate rule on the triangle (a, b, c), exact for total degree `order`.
Rule2D triangle(const Vec2& a, const Vec2& b, const Vec2& c, int order);

/// Gauss-Legendre rule on the segment [a, b], exact for polynomial degree `order`.
Rule2D segment(const Vec2& a, const Vec2& b, int order);

}  // namespace xtpoly::quad

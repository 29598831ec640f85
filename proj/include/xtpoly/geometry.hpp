#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace xtpoly {

using Vec2 = Eigen::Vector2d;

struct BBox {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{0.0, 0.0};

  Vec2 center() const { return 0.5 * (lo + hi); }
  Vec2 half_extent() const { return 0.5 * (hi - lo); }
  double area() const { return (hi.x() - lo.x()) * (hi.y() - lo.y()); }
};

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

namespace geom {

/// Signed area (positive for counterclockwise loops).
double signed_area(std::span<const Vec2> poly);
Vec2 centroid(std::span<const Vec2> poly);
double diameter(std::span<const Vec2> poly);
BBox bounding_box(std::span<const Vec2> poly);

/// True when no two non-adjacent edges intersect.
bool is_simple(std::span<const Vec2> poly);

/// Winding number of `poly` around `p`; 0 means outside.
int winding_number(std::span<const Vec2> poly, const Vec2& p);

/// Distance from p to the closed segment [a, b].
double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Distance from p to the polygon boundary.
double boundary_distance(std::span<const Vec2> poly, const Vec2& p);

/// Clip a convex polygon by the half-plane {x : n.x <= c} (Sutherland-Hodgman).
std::vector<Vec2> clip_halfplane(std::span<const Vec2> poly, const Vec2& n, double c);

}  // namespace geom
}  // namespace xtpoly

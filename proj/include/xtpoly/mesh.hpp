#pragma once

#include "xtpoly/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace xtpoly {

enum class Region : std::uint8_t { Elastic, Poroelastic };

enum class FaceClass : std::uint8_t {
  InteriorElastic,
  InteriorPoro,
  BoundaryElastic,
  BoundaryPoro,
  Interface,
};

/// Outer boundary side, from the dominant component of the outward normal.
enum class BoundarySide : std::uint8_t { None, Left, Right, Bottom, Top };

char region_tag(Region r);
std::string to_string(FaceClass c);
std::string to_string(BoundarySide s);

struct Element {
  std::vector<int> vertices;  // counterclockwise
  Region region = Region::Elastic;
  double area = 0.0;
  Vec2 centroid{0.0, 0.0};
  double diameter = 0.0;  // h_kappa
  BBox box;
  std::vector<int> faces;      // faces[i] is the edge (vertices[i], vertices[i+1])
  std::vector<int> face_sign;  // +1 when the face normal points out of this element
};

struct Face {
  std::array<int, 2> vertices{-1, -1};  // ordered along the loop of elements[0]
  std::array<int, 2> elements{-1, -1};  // elements[1] == -1 on the boundary
  FaceClass cls = FaceClass::InteriorElastic;
  Vec2 normal{0.0, 0.0};  // unit, outward from elements[0]; n_p on the interface
  double length = 0.0;
  BoundarySide side = BoundarySide::None;

  bool is_boundary() const { return elements[1] < 0; }
};

/// One simplex of an element's sub-triangulation.
struct SubTriangle {
  std::array<Vec2, 3> p;
  std::array<int, 3> edge_face{-1, -1, -1};  // element face on edge (p[i], p[i+1]), or -1
  double area() const;
  bool has_face(int f) const { return edge_face[0] == f || edge_face[1] == f || edge_face[2] == f; }
};

/// Immutable 2D polygonal mesh aligned with the elastic/poroelastic split.
///
/// Construction validates every invariant (simple counterclockwise polygons,
/// face matching, conformity along the boundary, area balance) and throws
/// TopologyError naming the offending element or face.
class PolyMesh {
 public:
  PolyMesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> loops,
           std::vector<Region> regions);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Element& element(int e) const { return elements_[e]; }
  const Face& face(int f) const { return faces_[f]; }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }

  std::vector<Vec2> polygon(int e) const;
  const std::vector<SubTriangle>& sub_triangles(int e) const { return subtri_[e]; }

  /// Outward unit normal of face f seen from element e.
  Vec2 outward_normal(int f, int e) const;

  /// Element containing p (winding number), or -1.
  int locate(const Vec2& p) const;

  double domain_area() const { return domain_area_; }
  BBox bounding_box() const { return box_; }
  int count(FaceClass c) const;
  int count(Region r) const;

 private:
  void build_faces();
  void build_sub_triangulation();
  void validate() const;

  std::vector<Vec2> vertices_;
  std::vector<Element> elements_;
  std::vector<Face> faces_;
  std::vector<std::vector<SubTriangle>> subtri_;
  double domain_area_ = 0.0;
  BBox box_;
};

/// Axis-aligned rectangle with a region tag; the generator input.
struct RegionRect {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  Region region = Region::Elastic;
  double area() const { return (xmax - xmin) * (ymax - ymin); }
};

struct MeshGenOptions {
  int lloyd_iterations = 20;
};

/// Lloyd-relaxed Voronoi mesh, clipped per rectangle, deterministic for a fixed seed.
PolyMesh generate_mesh(std::span<const RegionRect> rects, int n_elements, std::uint64_t seed,
                       const MeshGenOptions& opts = {});

PolyMesh read_mesh(std::istream& in);
PolyMesh read_mesh(const std::filesystem::path& path);
void write_mesh(std::ostream& out, const PolyMesh& mesh);
void write_mesh(const std::filesystem::path& path, const PolyMesh& mesh);

/// Shape-regularity and hp-local-variation constants. Purely diagnostic.
struct RegularityReport {
  std::vector<double> element_ratio;  // max_F h |F| / (d |S_F|) per element
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double max_h_variation = 1.0;  // max over neighbor pairs of h+/h- (>= 1)
  double max_p_variation = 1.0;
  double max_trace_inverse = 0.0;  // filled by fespace diagnostics when requested
  std::vector<std::string> warnings;
};

/// `degrees` holds one polynomial degree per element; empty means uniform.
RegularityReport check_regularity(const PolyMesh& mesh, std::span<const int> degrees = {});

}  // namespace xtpoly

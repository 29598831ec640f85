#include "xtpoly/mesh.hpp"

#include "xtpoly/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace xtpoly {

char region_tag(Region r) { return r == Region::Elastic ? 'e' : 'p'; }

std::string to_string(FaceClass c) {
  switch (c) {
    case FaceClass::InteriorElastic: return "interior-e";
    case FaceClass::InteriorPoro: return "interior-p";
    case FaceClass::BoundaryElastic: return "boundary-e";
    case FaceClass::BoundaryPoro: return "boundary-p";
    case FaceClass::Interface: return "interface";
  }
  return "unknown";
}

std::string to_string(BoundarySide s) {
  switch (s) {
    case BoundarySide::None: return "none";
    case BoundarySide::Left: return "left";
    case BoundarySide::Right: return "right";
    case BoundarySide::Bottom: return "bottom";
    case BoundarySide::Top: return "top";
  }
  return "unknown";
}

double SubTriangle::area() const { return 0.5 * cross(p[1] - p[0], p[2] - p[0]); }

namespace {

std::string elem_name(int e) { return "element " + std::to_string(e); }

// Ear clipping for a simple counterclockwise polygon. Returns index triples.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& poly) {
  std::vector<int> idx(poly.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::array<int, 3>> tris;
  const double scale = geom::diameter(poly);
  const double eps = 1e-14 * scale * scale;
  int guard = 0;
  while (idx.size() > 3 && guard < 100000) {
    ++guard;
    bool clipped = false;
    const int m = static_cast<int>(idx.size());
    for (int i = 0; i < m; ++i) {
      const int ia = idx[(i + m - 1) % m], ib = idx[i], ic = idx[(i + 1) % m];
      const Vec2 &a = poly[ia], &b = poly[ib], &c = poly[ic];
      if (cross(b - a, c - b) <= eps) continue;
      bool inside = false;
      for (int j = 0; j < m && !inside; ++j) {
        const int k = idx[j];
        if (k == ia || k == ib || k == ic) continue;
        const Vec2& q = poly[k];
        if (cross(b - a, q - a) >= -eps && cross(c - b, q - b) >= -eps &&
            cross(a - c, q - c) >= -eps)
          inside = true;
      }
      if (inside) continue;
      tris.push_back({ia, ib, ic});
      idx.erase(idx.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped) break;
  }
  if (idx.size() == 3) tris.push_back({idx[0], idx[1], idx[2]});
  else throw TopologyError("ear clipping failed");
  return tris;
}

}  // namespace

PolyMesh::PolyMesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> loops,
                   std::vector<Region> regions)
    : vertices_(std::move(vertices)) {
  if (loops.size() != regions.size())
    throw TopologyError("loop and region counts differ");
  if (loops.empty()) throw TopologyError("mesh has no elements");
  const int nv = static_cast<int>(vertices_.size());
  for (const auto& v : vertices_)
    if (!std::isfinite(v.x()) || !std::isfinite(v.y()))
      throw TopologyError("non-finite vertex coordinate");
  box_ = geom::bounding_box(vertices_);

  elements_.resize(loops.size());
  for (std::size_t e = 0; e < loops.size(); ++e) {
    const int ei = static_cast<int>(e);
    auto& el = elements_[e];
    el.vertices = std::move(loops[e]);
    el.region = regions[e];
    if (el.vertices.size() < 3)
      throw TopologyError(elem_name(ei) + " has fewer than 3 vertices");
    for (int v : el.vertices)
      if (v < 0 || v >= nv)
        throw TopologyError(elem_name(ei) + " references missing vertex " + std::to_string(v));
    for (std::size_t i = 0; i < el.vertices.size(); ++i)
      if (el.vertices[i] == el.vertices[(i + 1) % el.vertices.size()])
        throw TopologyError(elem_name(ei) + " has a repeated vertex");
    const auto poly = polygon(ei);
    const double a = geom::signed_area(poly);
    if (!(a > 0.0))
      throw TopologyError(elem_name(ei) + " is not counterclockwise with positive area");
    if (!geom::is_simple(poly)) throw TopologyError(elem_name(ei) + " is not simple");
    el.area = a;
    el.centroid = geom::centroid(poly);
    el.diameter = geom::diameter(poly);
    el.box = geom::bounding_box(poly);
  }
  build_faces();
  build_sub_triangulation();
  validate();
}

std::vector<Vec2> PolyMesh::polygon(int e) const {
  const auto& vs = elements_[e].vertices;
  std::vector<Vec2> p;
  p.reserve(vs.size());
  for (int v : vs) p.push_back(vertices_[v]);
  return p;
}

void PolyMesh::build_faces() {
  // Directed edge (a,b) of the owning loop; the twin is (b,a).
  std::map<std::pair<int, int>, std::pair<int, int>> directed;  // -> (element, local index)
  for (int e = 0; e < num_elements(); ++e) {
    const auto& vs = elements_[e].vertices;
    const int k = static_cast<int>(vs.size());
    for (int i = 0; i < k; ++i) {
      const auto key = std::make_pair(vs[i], vs[(i + 1) % k]);
      if (!directed.emplace(key, std::make_pair(e, i)).second)
        throw TopologyError(elem_name(e) + " shares an edge with the same orientation as " +
                            elem_name(directed[key].first) + " (overlap or inconsistent winding)");
    }
    elements_[e].faces.assign(k, -1);
    elements_[e].face_sign.assign(k, 0);
  }

  for (int e = 0; e < num_elements(); ++e) {
    const auto& vs = elements_[e].vertices;
    const int k = static_cast<int>(vs.size());
    for (int i = 0; i < k; ++i) {
      if (elements_[e].faces[i] >= 0) continue;
      const int a = vs[i], b = vs[(i + 1) % k];
      Face f;
      const auto twin = directed.find({b, a});
      int e0 = e, i0 = i, e1 = -1, i1 = -1;
      if (twin != directed.end()) {
        e1 = twin->second.first;
        i1 = twin->second.second;
        const Region r0 = elements_[e0].region, r1 = elements_[e1].region;
        const bool swap = (r0 != r1) ? (r0 == Region::Elastic) : (e1 < e0);
        if (swap) {
          std::swap(e0, e1);
          std::swap(i0, i1);
        }
      }
      const auto& v0 = elements_[e0].vertices;
      const int k0 = static_cast<int>(v0.size());
      f.vertices = {v0[i0], v0[(i0 + 1) % k0]};
      f.elements = {e0, e1};
      const Vec2 d = vertices_[f.vertices[1]] - vertices_[f.vertices[0]];
      f.length = d.norm();
      if (!(f.length > 0.0)) throw TopologyError(elem_name(e) + " has a zero-length edge");
      f.normal = Vec2(d.y(), -d.x()) / f.length;
      const Region r0 = elements_[e0].region;
      if (e1 < 0) {
        f.cls = r0 == Region::Elastic ? FaceClass::BoundaryElastic : FaceClass::BoundaryPoro;
        const Vec2& n = f.normal;
        if (std::abs(n.x()) >= std::abs(n.y()))
          f.side = n.x() < 0 ? BoundarySide::Left : BoundarySide::Right;
        else
          f.side = n.y() < 0 ? BoundarySide::Bottom : BoundarySide::Top;
      } else if (r0 != elements_[e1].region) {
        f.cls = FaceClass::Interface;
      } else {
        f.cls = r0 == Region::Elastic ? FaceClass::InteriorElastic : FaceClass::InteriorPoro;
      }
      const int fid = static_cast<int>(faces_.size());
      faces_.push_back(f);
      elements_[e0].faces[i0] = fid;
      elements_[e0].face_sign[i0] = 1;
      if (e1 >= 0) {
        elements_[e1].faces[i1] = fid;
        elements_[e1].face_sign[i1] = -1;
      }
    }
  }
}

void PolyMesh::build_sub_triangulation() {
  subtri_.resize(elements_.size());
  for (int e = 0; e < num_elements(); ++e) {
    const auto poly = polygon(e);
    const auto& el = elements_[e];
    const int k = static_cast<int>(poly.size());
    auto& out = subtri_[e];
    const double tol = 1e-12 * el.area;
    bool star = true;
    for (int i = 0; i < k && star; ++i)
      if (cross(poly[i] - el.centroid, poly[(i + 1) % k] - el.centroid) <= 2.0 * tol) star = false;
    if (star && geom::winding_number(poly, el.centroid) != 0) {
      for (int i = 0; i < k; ++i)
        out.push_back({{poly[i], poly[(i + 1) % k], el.centroid}, {el.faces[i], -1, -1}});
      continue;
    }
    for (const auto& t : ear_clip(poly)) {
      SubTriangle s{{poly[t[0]], poly[t[1]], poly[t[2]]}, {-1, -1, -1}};
      for (int j = 0; j < 3; ++j) {
        const int a = t[j], b = t[(j + 1) % 3];
        if (b == (a + 1) % k) s.edge_face[j] = el.faces[a];
      }
      out.push_back(s);
    }
  }
}

void PolyMesh::validate() const {
  // Boundary faces must not carry hanging vertices of other elements.
  std::vector<int> boundary_vertex(vertices_.size(), 0);
  double boundary_area = 0.0;
  for (const auto& f : faces_) {
    if (!f.is_boundary()) continue;
    const Vec2 &a = vertices_[f.vertices[0]], &b = vertices_[f.vertices[1]];
    boundary_area += 0.5 * cross(a, b);
    boundary_vertex[f.vertices[0]] = boundary_vertex[f.vertices[1]] = 1;
  }
  std::vector<char> used(vertices_.size(), 0);
  for (const auto& el : elements_)
    for (int v : el.vertices) used[v] = 1;
  const double scale = std::max(box_.hi.x() - box_.lo.x(), box_.hi.y() - box_.lo.y());
  for (int fi = 0; fi < num_faces(); ++fi) {
    const auto& f = faces_[fi];
    if (!f.is_boundary()) continue;
    const Vec2 &a = vertices_[f.vertices[0]], &b = vertices_[f.vertices[1]];
    const BBox fb{a.cwiseMin(b), a.cwiseMax(b)};
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      if (!used[v] || static_cast<int>(v) == f.vertices[0] || static_cast<int>(v) == f.vertices[1])
        continue;
      const Vec2& q = vertices_[v];
      if (q.x() < fb.lo.x() - 1e-12 * scale || q.x() > fb.hi.x() + 1e-12 * scale ||
          q.y() < fb.lo.y() - 1e-12 * scale || q.y() > fb.hi.y() + 1e-12 * scale)
        continue;
      if (geom::segment_distance(q, a, b) < 1e-10 * scale)
        throw TopologyError("face " + std::to_string(fi) + " of " + elem_name(f.elements[0]) +
                            " is non-conforming (hanging vertex " + std::to_string(v) + ")");
    }
  }
  double sum = 0.0;
  for (const auto& el : elements_) sum += el.area;
  if (std::abs(sum - boundary_area) > 1e-10 * std::abs(boundary_area))
    throw TopologyError("element areas do not sum to the enclosed domain area");
  const_cast<PolyMesh*>(this)->domain_area_ = boundary_area;

  for (int e = 0; e < num_elements(); ++e) {
    double s = 0.0;
    for (const auto& t : subtri_[e]) {
      if (!(t.area() > 0.0)) throw TopologyError(elem_name(e) + " has a degenerate sub-triangle");
      s += t.area();
    }
    if (std::abs(s - elements_[e].area) > 1e-12 * elements_[e].area)
      throw TopologyError(elem_name(e) + " sub-triangulation does not cover the polygon");
  }
}

Vec2 PolyMesh::outward_normal(int f, int e) const {
  const auto& face = faces_[f];
  return face.elements[0] == e ? face.normal : Vec2(-face.normal);
}

int PolyMesh::locate(const Vec2& p) const {
  for (int e = 0; e < num_elements(); ++e) {
    const auto& b = elements_[e].box;
    const double tol = 1e-12 * elements_[e].diameter;
    if (p.x() < b.lo.x() - tol || p.x() > b.hi.x() + tol || p.y() < b.lo.y() - tol ||
        p.y() > b.hi.y() + tol)
      continue;
    const auto poly = polygon(e);
    if (geom::winding_number(poly, p) != 0 || geom::boundary_distance(poly, p) <= tol) return e;
  }
  return -1;
}

int PolyMesh::count(FaceClass c) const {
  return static_cast<int>(
      std::count_if(faces_.begin(), faces_.end(), [c](const Face& f) { return f.cls == c; }));
}

int PolyMesh::count(Region r) const {
  return static_cast<int>(std::count_if(elements_.begin(), elements_.end(),
                                        [r](const Element& e) { return e.region == r; }));
}

// ---------------------------------------------------------------------------
// Generator

namespace {

double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

std::vector<Vec2> voronoi_cell(const RegionRect& r, const std::vector<Vec2>& seeds, int i,
                               std::vector<int>& order) {
  std::vector<Vec2> cell = {{r.xmin, r.ymin}, {r.xmax, r.ymin}, {r.xmax, r.ymax}, {r.xmin, r.ymax}};
  const Vec2 s = seeds[i];
  order.resize(seeds.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = (seeds[a] - s).squaredNorm(), db = (seeds[b] - s).squaredNorm();
    return da < db || (da == db && a < b);
  });
  for (int j : order) {
    if (j == i) continue;
    const Vec2 d = seeds[j] - s;
    const double dist = d.norm();
    double rmax = 0.0;
    for (const auto& v : cell) rmax = std::max(rmax, (v - s).norm());
    if (0.5 * dist > rmax) break;
    if (dist == 0.0) continue;
    const Vec2 mid = 0.5 * (seeds[j] + s);
    cell = geom::clip_halfplane(cell, d, d.dot(mid));
    if (cell.size() < 3) break;
  }
  return cell;
}

std::vector<std::vector<Vec2>> voronoi_rect(const RegionRect& r, int n, std::uint64_t seed,
                                            int rect_index, int iterations) {
  if (n == 1)
    return {{{r.xmin, r.ymin}, {r.xmax, r.ymin}, {r.xmax, r.ymax}, {r.xmin, r.ymax}}};
  std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(rect_index)};
  std::mt19937_64 g(sq);
  std::vector<Vec2> seeds(n);
  for (auto& s : seeds)
    s = {r.xmin + (r.xmax - r.xmin) * uniform01(g), r.ymin + (r.ymax - r.ymin) * uniform01(g)};
  std::vector<int> order;
  std::vector<std::vector<Vec2>> cells(n);
  for (int it = 0; it <= iterations; ++it) {
    for (int i = 0; i < n; ++i) cells[i] = voronoi_cell(r, seeds, i, order);
    if (it == iterations) break;
    for (int i = 0; i < n; ++i)
      if (cells[i].size() >= 3 && geom::signed_area(cells[i]) > 0.0)
        seeds[i] = geom::centroid(cells[i]);
  }
  return cells;
}

// Vertex deduplication on a hash grid with tolerance.
class VertexPool {
 public:
  explicit VertexPool(double tol) : tol_(tol), cell_(4.0 * tol) {}

  int insert(const Vec2& p) {
    const long long ix = std::llround(std::floor(p.x() / cell_));
    const long long iy = std::llround(std::floor(p.y() / cell_));
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = grid_.find(key(ix + dx, iy + dy));
        if (it == grid_.end()) continue;
        for (int v : it->second)
          if ((pts_[v] - p).norm() <= tol_) return v;
      }
    const int id = static_cast<int>(pts_.size());
    pts_.push_back(p);
    grid_[key(ix, iy)].push_back(id);
    return id;
  }
  std::vector<Vec2>& points() { return pts_; }

 private:
  static std::uint64_t key(long long x, long long y) {
    return (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ULL) ^ static_cast<std::uint64_t>(y);
  }
  double tol_, cell_;
  std::vector<Vec2> pts_;
  std::unordered_map<std::uint64_t, std::vector<int>> grid_;
};

}  // namespace

PolyMesh generate_mesh(std::span<const RegionRect> rects, int n_elements, std::uint64_t seed,
                       const MeshGenOptions& opts) {
  if (rects.empty()) throw TopologyError("no rectangles given");
  double total = 0.0;
  BBox dom{{rects[0].xmin, rects[0].ymin}, {rects[0].xmax, rects[0].ymax}};
  for (std::size_t i = 0; i < rects.size(); ++i) {
    const auto& r = rects[i];
    if (!(r.xmax > r.xmin) || !(r.ymax > r.ymin) || !std::isfinite(r.area()))
      throw TopologyError("rectangle " + std::to_string(i) + " is degenerate (zero area)");
    total += r.area();
    dom.lo = dom.lo.cwiseMin(Vec2(r.xmin, r.ymin));
    dom.hi = dom.hi.cwiseMax(Vec2(r.xmax, r.ymax));
  }
  const double scale = std::max(dom.hi.x() - dom.lo.x(), dom.hi.y() - dom.lo.y());
  for (std::size_t i = 0; i < rects.size(); ++i)
    for (std::size_t j = i + 1; j < rects.size(); ++j) {
      const auto &a = rects[i], &b = rects[j];
      const double ox = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
      const double oy = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
      if (ox > 1e-12 * scale && oy > 1e-12 * scale)
        throw TopologyError("rectangles " + std::to_string(i) + " and " + std::to_string(j) +
                            " overlap");
    }
  const int nr = static_cast<int>(rects.size());
  if (n_elements < nr)
    throw TopologyError("n_elements = " + std::to_string(n_elements) +
                        " is too small: every rectangle needs at least one element");

  // Largest-remainder allocation proportional to area, at least one per rectangle.
  std::vector<int> count(nr, 1);
  const int spare = n_elements - nr;
  std::vector<std::pair<double, int>> rem;
  int assigned = 0;
  for (int i = 0; i < nr; ++i) {
    const double share = spare * rects[i].area() / total;
    const int whole = static_cast<int>(std::floor(share));
    count[i] += whole;
    assigned += whole;
    rem.emplace_back(share - whole, i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (int k = 0; assigned < spare; ++k, ++assigned) ++count[rem[k % nr].second];

  VertexPool pool(1e-9 * scale);
  std::vector<std::vector<int>> loops;
  std::vector<Region> regions;
  for (int i = 0; i < nr; ++i) {
    const auto cells = voronoi_rect(rects[i], count[i], seed, i, opts.lloyd_iterations);
    for (const auto& c : cells) {
      std::vector<int> loop;
      for (const auto& p : c) {
        const int v = pool.insert(p);
        if (loop.empty() || loop.back() != v) loop.push_back(v);
      }
      while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
      if (loop.size() < 3) throw TopologyError("generator produced a degenerate cell");
      loops.push_back(std::move(loop));
      regions.push_back(rects[i].region);
    }
  }

  // Split edges at vertices of other cells (rectangle junctions).
  auto& pts = pool.points();
  const double tol = 1e-9 * scale;
  for (auto& loop : loops) {
    std::vector<int> out;
    const int k = static_cast<int>(loop.size());
    for (int i = 0; i < k; ++i) {
      const int a = loop[i], b = loop[(i + 1) % k];
      out.push_back(a);
      const Vec2 pa = pts[a], pb = pts[b];
      const Vec2 d = pb - pa;
      const double len2 = d.squaredNorm();
      const BBox eb{pa.cwiseMin(pb), pa.cwiseMax(pb)};
      std::vector<std::pair<double, int>> hang;
      for (int v = 0; v < static_cast<int>(pts.size()); ++v) {
        if (v == a || v == b) continue;
        const Vec2& q = pts[v];
        if (q.x() < eb.lo.x() - tol || q.x() > eb.hi.x() + tol || q.y() < eb.lo.y() - tol ||
            q.y() > eb.hi.y() + tol)
          continue;
        const double t = (q - pa).dot(d) / len2;
        if (t <= 0.0 || t >= 1.0) continue;
        if ((pa + t * d - q).norm() < tol) hang.emplace_back(t, v);
      }
      std::sort(hang.begin(), hang.end());
      for (const auto& h : hang) out.push_back(h.second);
    }
    loop = std::move(out);
  }
  return PolyMesh(std::move(pts), std::move(loops), std::move(regions));
}

// ---------------------------------------------------------------------------
// IO

PolyMesh read_mesh(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next = [&](std::istringstream& ss) {
    while (std::getline(in, line)) {
      ++lineno;
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '#') continue;
      ss.clear();
      ss.str(line);
      return true;
    }
    return false;
  };
  std::istringstream ss;
  if (!next(ss)) throw ParseError("empty mesh file", 1);
  std::string magic, dim;
  long long nv = -1, ne = -1;
  if (!(ss >> magic >> dim >> nv >> ne) || magic != "polymesh" || dim != "2d" || nv < 0 || ne < 0)
    throw ParseError("expected header 'polymesh 2d <n_vertices> <n_elements>'", lineno);
  std::string extra;
  if (ss >> extra) throw ParseError("trailing tokens in header", lineno);

  std::vector<Vec2> verts(nv);
  for (long long i = 0; i < nv; ++i) {
    if (!next(ss)) throw ParseError("unexpected end of file in vertex block", lineno + 1);
    double x, y;
    if (!(ss >> x >> y)) throw ParseError("expected vertex coordinates 'x y'", lineno);
    if (ss >> extra) throw ParseError("trailing tokens after vertex", lineno);
    verts[i] = {x, y};
  }
  std::vector<std::vector<int>> loops(ne);
  std::vector<Region> regions(ne);
  for (long long e = 0; e < ne; ++e) {
    if (!next(ss)) throw ParseError("unexpected end of file in element block", lineno + 1);
    std::string tag;
    long long k;
    if (!(ss >> tag >> k) || (tag != "e" && tag != "p") || k < 3)
      throw ParseError("expected element line '<e|p> <k> v1 ... vk' with k >= 3", lineno);
    regions[e] = tag == "e" ? Region::Elastic : Region::Poroelastic;
    loops[e].resize(k);
    for (long long j = 0; j < k; ++j) {
      long long v;
      if (!(ss >> v)) throw ParseError("expected " + std::to_string(k) + " vertex indices", lineno);
      if (v < 0 || v >= nv)
        throw TopologyError(elem_name(static_cast<int>(e)) + " references missing vertex " +
                            std::to_string(v));
      loops[e][j] = static_cast<int>(v);
    }
    if (ss >> extra) throw ParseError("trailing tokens after element", lineno);
  }
  if (next(ss)) throw ParseError("unexpected content after element block", lineno);
  return PolyMesh(std::move(verts), std::move(loops), std::move(regions));
}

PolyMesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file " + path.string());
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const PolyMesh& mesh) {
  char buf[64];
  out << "polymesh 2d " << mesh.vertices().size() << ' ' << mesh.num_elements() << '\n';
  for (const auto& v : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g", v.x(), v.y());
    out << buf << '\n';
  }
  for (const auto& el : mesh.elements()) {
    out << region_tag(el.region) << ' ' << el.vertices.size();
    for (int v : el.vertices) out << ' ' << v;
    out << '\n';
  }
}

void write_mesh(const std::filesystem::path& path, const PolyMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mesh file " + path.string());
  write_mesh(out, mesh);
}

// ---------------------------------------------------------------------------
// Diagnostics

RegularityReport check_regularity(const PolyMesh& mesh, std::span<const int> degrees) {
  RegularityReport rep;
  const int ne = mesh.num_elements();
  rep.element_ratio.assign(ne, 0.0);
  constexpr double d = 2.0;
  for (int e = 0; e < ne; ++e) {
    const auto& el = mesh.element(e);
    double worst = 0.0;
    for (std::size_t i = 0; i < el.faces.size(); ++i) {
      const int f = el.faces[i];
      double s = 0.0;
      for (const auto& t : mesh.sub_triangles(e))
        if (t.has_face(f)) s = std::max(s, t.area());
      if (s <= 0.0) {
        rep.warnings.push_back("element " + std::to_string(e) + ": face " + std::to_string(f) +
                               " has no sub-triangle");
        continue;
      }
      worst = std::max(worst, el.diameter * mesh.face(f).length / (d * s));
    }
    rep.element_ratio[e] = worst;
  }
  if (ne > 0) {
    rep.max_ratio = *std::max_element(rep.element_ratio.begin(), rep.element_ratio.end());
    rep.min_ratio = *std::min_element(rep.element_ratio.begin(), rep.element_ratio.end());
  }
  for (const auto& f : mesh.faces()) {
    if (f.is_boundary()) continue;
    const int a = f.elements[0], b = f.elements[1];
    const double ha = mesh.element(a).diameter, hb = mesh.element(b).diameter;
    rep.max_h_variation = std::max(rep.max_h_variation, std::max(ha / hb, hb / ha));
    if (!degrees.empty()) {
      const double pa = degrees[a], pb = degrees[b];
      rep.max_p_variation = std::max(rep.max_p_variation, std::max(pa / pb, pb / pa));
    }
  }
  if (rep.max_ratio > 50.0)
    rep.warnings.push_back("large shape-regularity constant " + std::to_string(rep.max_ratio));
  if (rep.max_h_variation > 10.0)
    rep.warnings.push_back("large neighbor size variation " +
                           std::to_string(rep.max_h_variation));
  return rep;
}

}  // namespace xtpoly

#include "xtpoly/output.hpp"

#include "xtpoly/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

namespace xtpoly {

const char* const kReceiverHeader =
    "t,ux_e,uy_e,vx_e,vy_e,ux_p,uy_p,vx_p,vy_p,ux_f,uy_f,vx_f,vy_f";

std::string format_double(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

ReceiverProbe::ReceiverProbe(const FESpace& space, std::string name, const Vec2& x)
    : space_(&space), name_(std::move(name)), x_(x), e_(space.mesh().locate(x)) {
  if (e_ < 0) throw ValidationError({"receiver '" + name_ + "' lies outside the mesh"});
}

Region ReceiverProbe::region() const { return space_->mesh().element(e_).region; }

ReceiverRow ReceiverProbe::sample(const Eigen::VectorXd& U, const Eigen::VectorXd& V) const {
  ReceiverRow row;
  row.fill(std::numeric_limits<double>::quiet_NaN());
  for (Field f : kFields) {
    if (!space_->has(e_, f)) continue;
    const int c = 4 * static_cast<int>(f);
    const Vec2 u = space_->evaluate(U, e_, f, x_), v = space_->evaluate(V, e_, f, x_);
    row[c] = u.x();
    row[c + 1] = u.y();
    row[c + 2] = v.x();
    row[c + 3] = v.y();
  }
  return row;
}

void write_receiver_csv(std::ostream& out, const ReceiverSeries& s) {
  out << kReceiverHeader << '\n';
  for (size_t i = 0; i < s.rows.size(); ++i) {
    out << format_double(s.t[i]);
    for (double v : s.rows[i]) {
      out << ',';
      if (!std::isnan(v)) out << format_double(v);
    }
    out << '\n';
  }
}

void write_receiver_csv(const std::filesystem::path& path, const ReceiverSeries& s) {
  auto out = open_out(path);
  write_receiver_csv(out, s);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_vtk_snapshot(std::ostream& out, const FESpace& space, const Eigen::VectorXd& U,
                        const Eigen::VectorXd& V, double t) {
  const PolyMesh& mesh = space.mesh();
  struct Pt {
    Vec2 x;
    int e;
  };
  std::vector<Pt> pts;
  std::vector<int> cell_region;
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (const auto& tri : mesh.sub_triangles(e)) {
      for (const auto& p : tri.p) pts.push_back({p, e});
      cell_region.push_back(mesh.element(e).region == Region::Poroelastic ? 1 : 0);
    }
  const size_t np = pts.size(), nc = cell_region.size();

  out << "# vtk DataFile Version 3.0\n";
  out << "xtpoly snapshot t=" << format_double(t) << "\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "FIELD FieldData 1\nTIME 1 1 double\n" << format_double(t) << "\n";
  out << "POINTS " << np << " double\n";
  for (const auto& p : pts) out << format_double(p.x.x()) << ' ' << format_double(p.x.y()) << " 0\n";
  out << "CELLS " << nc << ' ' << 4 * nc << '\n';
  for (size_t c = 0; c < nc; ++c) out << "3 " << 3 * c << ' ' << 3 * c + 1 << ' ' << 3 * c + 2 << '\n';
  out << "CELL_TYPES " << nc << '\n';
  for (size_t c = 0; c < nc; ++c) out << "5\n";

  auto vectors = [&](const char* name, const Eigen::VectorXd& X, bool fluid) {
    out << "VECTORS " << name << " double\n";
    for (const auto& p : pts) {
      const bool poro = mesh.element(p.e).region == Region::Poroelastic;
      Vec2 v(0.0, 0.0);
      if (fluid) {
        if (poro) v = space.evaluate(X, p.e, Field::Fluid, p.x);
      } else {
        v = space.evaluate(X, p.e, poro ? Field::Solid : Field::Elastic, p.x);
      }
      out << format_double(v.x()) << ' ' << format_double(v.y()) << " 0\n";
    }
  };
  out << "POINT_DATA " << np << '\n';
  vectors("displacement", U, false);
  vectors("velocity", V, false);
  vectors("fluid_displacement", U, true);
  vectors("fluid_velocity", V, true);
  out << "CELL_DATA " << nc << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (int r : cell_region) out << r << '\n';
}

void write_vtk_snapshot(const std::filesystem::path& path, const FESpace& space,
                        const Eigen::VectorXd& U, const Eigen::VectorXd& V, double t) {
  auto out = open_out(path);
  write_vtk_snapshot(out, space, U, V, t);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_energy_csv(const std::filesystem::path& path, const std::vector<EnergySample>& energy) {
  auto out = open_out(path);
  out << "t,energy,dissipated,total\n";
  for (const auto& s : energy)
    out << format_double(s.t) << ',' << format_double(s.energy) << ',' << format_double(s.dissipated)
        << ',' << format_double(s.total()) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace xtpoly

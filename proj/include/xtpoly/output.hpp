#pragma once

#include "xtpoly/fespace.hpp"
#include "xtpoly/timedg.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace xtpoly {

/// Column order after t: u and v for each field (x then y). NaN marks an absent field.
inline constexpr int kReceiverColumns = 12;
using ReceiverRow = std::array<double, kReceiverColumns>;
extern const char* const kReceiverHeader;

/// Point evaluation of displacement and velocity at a fixed location.
class ReceiverProbe {
 public:
  /// Throws ValidationError when x lies outside the mesh.
  ReceiverProbe(const FESpace& space, std::string name, const Vec2& x);
  const std::string& name() const { return name_; }
  const Vec2& x() const { return x_; }
  int element() const { return e_; }
  Region region() const;
  ReceiverRow sample(const Eigen::VectorXd& U, const Eigen::VectorXd& V) const;

 private:
  const FESpace* space_;
  std::string name_;
  Vec2 x_;
  int e_;
};

struct ReceiverSeries {
  std::string name;
  Vec2 x{0.0, 0.0};
  std::vector<double> t;
  std::vector<ReceiverRow> rows;
};

/// Header line, then one row per sample with empty cells for absent fields.
void write_receiver_csv(std::ostream& out, const ReceiverSeries& s);
void write_receiver_csv(const std::filesystem::path& path, const ReceiverSeries& s);

/// Legacy ASCII VTK unstructured grid over the sub-triangulation. Each element's
/// triangles carry their own vertices so discontinuities are preserved. Point data:
/// displacement and velocity of the elastic or solid field, fluid displacement and
/// velocity (zero on elastic cells). Cell data: region (0 elastic, 1 poroelastic).
void write_vtk_snapshot(std::ostream& out, const FESpace& space, const Eigen::VectorXd& U,
                        const Eigen::VectorXd& V, double t);
void write_vtk_snapshot(const std::filesystem::path& path, const FESpace& space,
                        const Eigen::VectorXd& U, const Eigen::VectorXd& V, double t);

/// Columns: t,energy,dissipated,total
void write_energy_csv(const std::filesystem::path& path, const std::vector<EnergySample>& energy);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace xtpoly

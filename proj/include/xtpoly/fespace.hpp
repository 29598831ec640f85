#pragma once

#include "xtpoly/mesh.hpp"
#include "xtpoly/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace xtpoly {

/// Displacement fields in global block order: elastic, poroelastic solid, filtration.
enum class Field : std::uint8_t { Elastic = 0, Solid = 1, Fluid = 2 };
inline constexpr std::array<Field, 3> kFields = {Field::Elastic, Field::Solid, Field::Fluid};

/// Number of total-degree-p polynomials in two variables.
inline int scalar_dim(int p) { return (p + 1) * (p + 2) / 2; }

/// Basis values and Cartesian gradients at a set of points (rows: points, cols: functions).
struct BasisTable {
  Eigen::MatrixXd val;
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
};

/// Tensor Legendre basis scaled to a bounding box, truncated to total degree p and
/// orthonormal on the box. Function 0 is the constant 1/sqrt(|box|).
class ScaledLegendre {
 public:
  ScaledLegendre(const BBox& box, int degree);
  int degree() const { return p_; }
  int size() const { return scalar_dim(p_); }
  /// Exponent pair (i, j) of function k.
  std::array<int, 2> exponents(int k) const { return idx_[k]; }
  void eval(const Vec2& x, Eigen::Ref<Eigen::VectorXd> val, Eigen::Ref<Eigen::VectorXd> dx,
            Eigen::Ref<Eigen::VectorXd> dy) const;
  BasisTable table(const std::vector<Vec2>& pts) const;

 private:
  Vec2 c_, s_;  // box center and half extents
  double scale_;
  int p_;
  std::vector<std::array<int, 2>> idx_;
};

using VectorField = std::function<Vec2(const Vec2&)>;

/// Discrete dG space for (u_e, u_p, u_f) with per-element degrees.
///
/// Global layout: all elastic dofs, then all solid dofs, then all fluid dofs. Inside a
/// field, elements appear in id order; each element stores the x component block
/// followed by the y component block.
class FESpace {
 public:
  FESpace(std::shared_ptr<const PolyMesh> mesh, int degree_e, int degree_p);
  FESpace(std::shared_ptr<const PolyMesh> mesh, std::vector<int> degrees);

  const PolyMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const PolyMesh> mesh_ptr() const { return mesh_; }

  int ndof() const { return ndof_; }
  int degree(int e) const { return degree_[e]; }
  const std::vector<int>& degrees() const { return degree_; }
  int nb(int e) const { return scalar_dim(degree_[e]); }
  bool has(int e, Field f) const;
  /// First global dof of (element, field); -1 if the field is absent on the element.
  int offset(int e, Field f) const { return offset_[static_cast<int>(f)][e]; }
  int field_offset(Field f) const { return field_begin_[static_cast<int>(f)]; }
  int field_size(Field f) const { return field_size_[static_cast<int>(f)]; }
  /// Fields carried by element e in block order.
  std::vector<Field> fields(int e) const;

  const ScaledLegendre& basis(int e) const { return basis_[e]; }

  /// Default integration order for element e (2p + 2).
  int order(int e) const { return 2 * degree_[e] + 2; }
  quad::Rule2D element_rule(int e, int order) const;
  quad::Rule2D face_rule(int f, int order) const;

  /// Element-wise L2 projection of a vector field into one field block of a global vector.
  void project(const VectorField& u, Field f, Eigen::Ref<Eigen::VectorXd> out,
               int extra_order = 2) const;
  Eigen::VectorXd project(const VectorField& u, Field f, int extra_order = 2) const;

  Vec2 evaluate(const Eigen::VectorXd& U, int e, Field f, const Vec2& x) const;
  /// Row r holds the gradient of component r.
  Eigen::Matrix2d gradient(const Eigen::VectorXd& U, int e, Field f, const Vec2& x) const;

  /// Element mass matrix of the scalar basis with the default rule.
  Eigen::MatrixXd local_mass(int e) const;

  /// Empirical trace-inverse constant C with |v|_{dK} <= C p h^{-1/2} |v|_K for all v.
  double trace_inverse_constant(int e) const;

 private:
  void build();

  std::shared_ptr<const PolyMesh> mesh_;
  std::vector<int> degree_;
  std::vector<ScaledLegendre> basis_;
  std::array<std::vector<int>, 3> offset_;
  std::array<int, 3> field_begin_{}, field_size_{};
  int ndof_ = 0;
};

}  // namespace xtpoly

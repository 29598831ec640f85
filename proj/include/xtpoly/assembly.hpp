#pragma once

#include "xtpoly/fespace.hpp"
#include "xtpoly/linalg.hpp"
#include "xtpoly/materials.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace xtpoly {

enum class BoundaryKind : std::uint8_t { Dirichlet, Absorbing, Free };

std::string to_string(BoundaryKind k);

/// One condition per outer side of the rectangular domain.
struct BoundaryConditions {
  BoundaryKind left = BoundaryKind::Dirichlet;
  BoundaryKind right = BoundaryKind::Dirichlet;
  BoundaryKind bottom = BoundaryKind::Dirichlet;
  BoundaryKind top = BoundaryKind::Dirichlet;

  BoundaryKind operator()(BoundarySide s) const;
  static BoundaryConditions all(BoundaryKind k) { return {k, k, k, k}; }
};

struct Materials {
  ElasticParams elastic;
  PoroParams poro;
};

struct PenaltyParams {
  double c1 = 10.0;
  double c2 = 10.0;
  /// Also multiply the one-sided penalties (boundary alpha and gamma, interface gamma) by
  /// c1 or c2. Without this the operator is not coercive on general meshes.
  bool scale_one_sided = true;
};

/// Data of one neighbor entering a penalty: coefficient (C_bar or m), degree, diameter.
struct PenaltySide {
  double coeff = 0.0;
  int degree = 1;
  double h = 1.0;
};

/// Displacement penalty. Interior and interface faces take c1 times the max over both
/// neighbors; boundary faces use the single neighbor without c1.
double penalty_alpha(FaceClass cls, double c1, const PenaltySide& a, const PenaltySide* b = nullptr);

/// Normal-jump penalty. Interior poroelastic faces take c2 times the max over both
/// neighbors; boundary poroelastic and interface faces use the poroelastic side alone.
/// `a` must be the poroelastic side on interface faces.
double penalty_gamma(FaceClass cls, double c2, const PenaltySide& a, const PenaltySide* b = nullptr);

struct AssemblyOptions {
  Materials materials;
  BoundaryConditions bc;
  PenaltyParams penalty;
  double delta = 1.0;  // fluid entry resistance on the interface
};

/// Global matrices of the semi-discrete system M U'' + D U' + (A + C) U = F.
struct BlockSystem {
  SparseMatrix M;  // mass
  SparseMatrix D;  // damping, including absorbing faces
  SparseMatrix A;  // elastic and poroelastic SIPG forms plus the div-div form
  SparseMatrix C;  // interface coupling
  SparseMatrix K() const { return A + C; }
};

/// Builds the global matrices for a space, materials and boundary setup. Immutable.
class Assembler {
 public:
  Assembler(std::shared_ptr<const FESpace> space, AssemblyOptions opts);

  const FESpace& space() const { return *space_; }
  std::shared_ptr<const FESpace> space_ptr() const { return space_; }
  const AssemblyOptions& options() const { return opts_; }
  const DerivedPoro& derived() const { return derived_; }

  /// Penalties per face; 0 where the penalty is not defined.
  double alpha(int f) const { return alpha_[f]; }
  double gamma(int f) const { return gamma_[f]; }

  /// True for outer faces whose side carries a Dirichlet condition.
  bool is_dirichlet(int f) const;
  /// Outer faces whose side is absorbing.
  std::vector<int> absorbing_faces() const;

  SparseMatrix mass() const;
  SparseMatrix damping() const;
  /// Damping with an explicit list of absorbing faces; every face must be an outer face.
  SparseMatrix damping(std::span<const int> absorbing) const;
  SparseMatrix stiffness() const;
  SparseMatrix coupling() const;
  BlockSystem assemble() const;

 private:
  std::shared_ptr<const FESpace> space_;
  AssemblyOptions opts_;
  DerivedPoro derived_;
  std::vector<double> alpha_, gamma_;
};

/// Sub-block of a global matrix between two fields.
SparseMatrix extract_block(const SparseMatrix& A, const FESpace& space, Field row, Field col);

// ---------------------------------------------------------------------------
// Loads

using SpaceTimeField = std::function<Vec2(const Vec2&, double)>;

/// Ricker wavelet (1 - 2 b (t - t0)^2) exp(-b (t - t0)^2), b = (pi f_p)^2.
double ricker(double t, double f_p, double t0);

/// Isotropic moment point source M0 I with Ricker time history.
struct PointSource {
  Vec2 x{0.0, 0.0};
  double M0 = 1.0;
  double f_p = 1.0;
  double t0 = 0.0;
  Region region = Region::Poroelastic;
};

/// Right-hand side data. Empty functions are treated as zero.
struct LoadData {
  SpaceTimeField f_e, f_p, g_p;        // body forces on the elastic, solid and fluid equations
  SpaceTimeField dir_e, dir_p, dir_f;  // Dirichlet traces of u_e, u_p, u_f
  std::vector<PointSource> sources;
};

/// Evaluates F_h(t) with cached basis tables.
class LoadAssembler {
 public:
  LoadAssembler(const Assembler& assembler, LoadData data);

  Eigen::VectorXd operator()(double t) const;
  /// out += scale * F_h(t)
  void add(double t, double scale, Eigen::Ref<Eigen::VectorXd> out) const;
  bool empty() const;

 private:
  struct ElementCache {
    int e;
    quad::Rule2D rule;
    Eigen::MatrixXd val;  // points x functions
  };
  struct FaceCache {
    int f, e;
    Vec2 n;
    quad::Rule2D rule;
    Eigen::MatrixXd val, dx, dy;
    double alpha, gamma;
  };

  std::shared_ptr<const FESpace> space_;
  Materials mat_;
  LoadData data_;
  std::vector<ElementCache> elems_;
  std::vector<FaceCache> faces_;
  std::vector<Eigen::VectorXd> source_vec_;
};

}  // namespace xtpoly

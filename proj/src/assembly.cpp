#include "xtpoly/assembly.hpp"

#include "xtpoly/error.hpp"
#include "xtpoly/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace xtpoly {

std::string to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::Dirichlet: return "dirichlet";
    case BoundaryKind::Absorbing: return "absorbing";
    case BoundaryKind::Free: return "free_surface";
  }
  return "?";
}

BoundaryKind BoundaryConditions::operator()(BoundarySide s) const {
  switch (s) {
    case BoundarySide::Left: return left;
    case BoundarySide::Right: return right;
    case BoundarySide::Bottom: return bottom;
    case BoundarySide::Top: return top;
    case BoundarySide::None: break;
  }
  throw std::logic_error("boundary condition requested for a face without a side");
}

namespace {

double penalty_term(const PenaltySide& s) {
  return s.coeff * static_cast<double>(s.degree) * static_cast<double>(s.degree) / s.h;
}

double both(const PenaltySide& a, const PenaltySide* b, const char* what) {
  if (!b) throw std::logic_error(std::string(what) + ": interior face needs both neighbors");
  return std::max(penalty_term(a), penalty_term(*b));
}

}  // namespace

double penalty_alpha(FaceClass cls, double c1, const PenaltySide& a, const PenaltySide* b) {
  switch (cls) {
    case FaceClass::InteriorElastic:
    case FaceClass::InteriorPoro:
    case FaceClass::Interface: return c1 * both(a, b, "penalty_alpha");
    case FaceClass::BoundaryElastic:
    case FaceClass::BoundaryPoro: return penalty_term(a);
  }
  throw std::logic_error("penalty_alpha: unknown face class");
}

double penalty_gamma(FaceClass cls, double c2, const PenaltySide& a, const PenaltySide* b) {
  switch (cls) {
    case FaceClass::InteriorPoro: return c2 * both(a, b, "penalty_gamma");
    case FaceClass::BoundaryPoro:
    case FaceClass::Interface: return penalty_term(a);
    case FaceClass::InteriorElastic:
    case FaceClass::BoundaryElastic: break;
  }
  throw std::logic_error("penalty_gamma: not defined on " + to_string(cls) + " faces");
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;
using Eigen::MatrixXd;

struct Lame {
  double lambda, mu;
};

// Scatter a square local matrix with global indices idx.
void scatter(const std::vector<int>& idx, const MatrixXd& K, Triplets& out) {
  const int n = static_cast<int>(idx.size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (K(i, j) != 0.0) out.emplace_back(idx[i], idx[j], K(i, j));
}

void append_range(std::vector<int>& idx, int off, int n) {
  for (int i = 0; i < n; ++i) idx.push_back(off + i);
}

SparseMatrix from_slots(int n, std::vector<Triplets>& slots) {
  std::size_t total = 0;
  for (const auto& s : slots) total += s.size();
  Triplets all;
  all.reserve(total);
  for (auto& s : slots) {
    all.insert(all.end(), s.begin(), s.end());
    Triplets().swap(s);
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(all.begin(), all.end());
  A.makeCompressed();
  return A;
}

struct ElementTab {
  quad::Rule2D rule;
  BasisTable t;
  Eigen::VectorXd w;
  MatrixXd gram(const MatrixXd& a, const MatrixXd& b) const {
    return a.transpose() * w.asDiagonal() * b;
  }
};

ElementTab element_tab(const FESpace& s, int e) {
  ElementTab et;
  et.rule = s.element_rule(e, s.order(e));
  et.t = s.basis(e).table(et.rule.x);
  et.w = Eigen::Map<const Eigen::VectorXd>(et.rule.w.data(), static_cast<Eigen::Index>(et.rule.w.size()));
  return et;
}

MatrixXd vector_mass(const ElementTab& et) {
  const MatrixXd m = et.gram(et.t.val, et.t.val);
  const int n = static_cast<int>(m.rows());
  MatrixXd M = MatrixXd::Zero(2 * n, 2 * n);
  M.topLeftCorner(n, n) = m;
  M.bottomRightCorner(n, n) = m;
  return M;
}

MatrixXd elastic_volume(const ElementTab& et, Lame L) {
  const MatrixXd gxx = et.gram(et.t.dx, et.t.dx), gxy = et.gram(et.t.dx, et.t.dy),
                 gyy = et.gram(et.t.dy, et.t.dy);
  const MatrixXd gyx = gxy.transpose();
  const int n = static_cast<int>(gxx.rows());
  MatrixXd K(2 * n, 2 * n);
  const double l2m = L.lambda + 2.0 * L.mu;
  K.topLeftCorner(n, n) = l2m * gxx + L.mu * gyy;
  K.topRightCorner(n, n) = L.lambda * gxy + L.mu * gyx;
  K.bottomLeftCorner(n, n) = L.lambda * gyx + L.mu * gxy;
  K.bottomRightCorner(n, n) = l2m * gyy + L.mu * gxx;
  return K;
}

MatrixXd divdiv(const ElementTab& et) {
  MatrixXd G(et.t.dx.rows(), 2 * et.t.dx.cols());
  G << et.t.dx, et.t.dy;
  return et.gram(G, G);
}

// Per quadrature point face matrices for one side. Columns: x block then y block.
struct FaceSide {
  int e = -1;
  int nb = 0;
  BasisTable t;
};

FaceSide face_side(const FESpace& s, int e, const quad::Rule2D& r) {
  return {e, s.nb(e), s.basis(e).table(r.x)};
}

// Vector basis values (2 x 2nb) at point q.
MatrixXd values(const FaceSide& s, int q) {
  MatrixXd V = MatrixXd::Zero(2, 2 * s.nb);
  V.row(0).head(s.nb) = s.t.val.row(q);
  V.row(1).tail(s.nb) = s.t.val.row(q);
  return V;
}

// Tractions sigma(phi e_c) n (2 x 2nb) at point q.
MatrixXd tractions(const FaceSide& s, int q, const Vec2& n, Lame L) {
  const int nb = s.nb;
  MatrixXd T(2, 2 * nb);
  for (int j = 0; j < nb; ++j) {
    const double gx = s.t.dx(q, j), gy = s.t.dy(q, j);
    const double dn = gx * n.x() + gy * n.y();
    T(0, j) = L.mu * (dn + gx * n.x()) + L.lambda * gx * n.x();
    T(1, j) = L.mu * gy * n.x() + L.lambda * gx * n.y();
    T(0, nb + j) = L.mu * gx * n.y() + L.lambda * gy * n.x();
    T(1, nb + j) = L.mu * (dn + gy * n.y()) + L.lambda * gy * n.y();
  }
  return T;
}

// Combined-variable normal trace (scale_s u_p + u_f).n and divergence m div(beta u_p + u_f),
// both as 1 x 4nb rows over [solid, fluid].
Eigen::RowVectorXd combined_normal(const FaceSide& s, int q, const Vec2& n, double scale_s) {
  const int nb = s.nb;
  Eigen::RowVectorXd r(4 * nb);
  const auto phi = s.t.val.row(q);
  r.segment(0, nb) = scale_s * n.x() * phi;
  r.segment(nb, nb) = scale_s * n.y() * phi;
  r.segment(2 * nb, nb) = n.x() * phi;
  r.segment(3 * nb, nb) = n.y() * phi;
  return r;
}

Eigen::RowVectorXd combined_div(const FaceSide& s, int q, double m, double beta) {
  const int nb = s.nb;
  Eigen::RowVectorXd r(4 * nb);
  r.segment(0, nb) = m * beta * s.t.dx.row(q);
  r.segment(nb, nb) = m * beta * s.t.dy.row(q);
  r.segment(2 * nb, nb) = m * s.t.dx.row(q);
  r.segment(3 * nb, nb) = m * s.t.dy.row(q);
  return r;
}

// w (-J^T T - T^T J + a J^T J)
void sipg_update(MatrixXd& K, double w, const MatrixXd& J, const MatrixXd& T, double a) {
  const MatrixXd JT = J.transpose() * T;
  K.noalias() -= w * (JT + JT.transpose());
  K.noalias() += (w * a) * (J.transpose() * J);
}

int face_order(const FESpace& s, const Face& f) {
  int p = s.degree(f.elements[0]);
  if (f.elements[1] >= 0) p = std::max(p, s.degree(f.elements[1]));
  return 2 * p + 1;
}

}  // namespace

// ---------------------------------------------------------------------------

Assembler::Assembler(std::shared_ptr<const FESpace> space, AssemblyOptions opts)
    : space_(std::move(space)), opts_(std::move(opts)) {
  if (!space_) throw std::invalid_argument("assembler needs a space");
  if (!(opts_.delta >= 0.0 && opts_.delta <= 1.0))
    throw ParameterError("interface parameter delta must lie in [0, 1]");
  if (!(opts_.penalty.c1 > 0.0) || !(opts_.penalty.c2 > 0.0))
    throw ParameterError("penalty constants c1 and c2 must be positive");
  const PolyMesh& mesh = space_->mesh();
  if (mesh.count(Region::Elastic) > 0) validate(opts_.materials.elastic);
  if (mesh.count(Region::Poroelastic) > 0) derived_ = derive_poro(opts_.materials.poro);

  const auto& me = opts_.materials.elastic;
  const auto& mp = opts_.materials.poro;
  auto alpha_side = [&](int e) {
    const bool el = mesh.element(e).region == Region::Elastic;
    const double cbar = el ? stiffness_bound(me.lambda, me.mu) : stiffness_bound(mp.lambda, mp.mu);
    return PenaltySide{cbar, space_->degree(e), mesh.element(e).diameter};
  };
  auto gamma_side = [&](int e) {
    return PenaltySide{mp.m, space_->degree(e), mesh.element(e).diameter};
  };
  const double s1 = opts_.penalty.scale_one_sided ? opts_.penalty.c1 : 1.0;
  const double s2 = opts_.penalty.scale_one_sided ? opts_.penalty.c2 : 1.0;
  alpha_.assign(mesh.num_faces(), 0.0);
  gamma_.assign(mesh.num_faces(), 0.0);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& F = mesh.face(f);
    const int e0 = F.elements[0], e1 = F.elements[1];
    if (F.is_boundary()) {
      alpha_[f] = s1 * penalty_alpha(F.cls, opts_.penalty.c1, alpha_side(e0));
      if (F.cls == FaceClass::BoundaryPoro)
        gamma_[f] = s2 * penalty_gamma(F.cls, opts_.penalty.c2, gamma_side(e0));
    } else {
      const auto b = alpha_side(e1);
      alpha_[f] = penalty_alpha(F.cls, opts_.penalty.c1, alpha_side(e0), &b);
      if (F.cls == FaceClass::InteriorPoro) {
        const auto g = gamma_side(e1);
        gamma_[f] = penalty_gamma(F.cls, opts_.penalty.c2, gamma_side(e0), &g);
      } else if (F.cls == FaceClass::Interface) {
        gamma_[f] = s2 * penalty_gamma(F.cls, opts_.penalty.c2, gamma_side(e0));
      }
    }
  }
}

bool Assembler::is_dirichlet(int f) const {
  const Face& F = space_->mesh().face(f);
  return F.is_boundary() && opts_.bc(F.side) == BoundaryKind::Dirichlet;
}

std::vector<int> Assembler::absorbing_faces() const {
  std::vector<int> out;
  const PolyMesh& mesh = space_->mesh();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& F = mesh.face(f);
    if (F.is_boundary() && opts_.bc(F.side) == BoundaryKind::Absorbing) out.push_back(f);
  }
  return out;
}

SparseMatrix Assembler::mass() const {
  const FESpace& s = *space_;
  const PolyMesh& mesh = s.mesh();
  std::vector<Triplets> slots(mesh.num_elements());
  parallel_for(mesh.num_elements(), [&](int e) {
    const ElementTab et = element_tab(s, e);
    const MatrixXd m = vector_mass(et);
    const int n2 = static_cast<int>(m.rows());
    std::vector<int> idx;
    if (mesh.element(e).region == Region::Elastic) {
      append_range(idx, s.offset(e, Field::Elastic), n2);
      scatter(idx, opts_.materials.elastic.rho * m, slots[e]);
    } else {
      append_range(idx, s.offset(e, Field::Solid), n2);
      append_range(idx, s.offset(e, Field::Fluid), n2);
      MatrixXd K(2 * n2, 2 * n2);
      K << derived_.rho_p * m, opts_.materials.poro.rho_f * m, opts_.materials.poro.rho_f * m,
          derived_.rho_w * m;
      scatter(idx, K, slots[e]);
    }
  });
  return from_slots(s.ndof(), slots);
}

SparseMatrix Assembler::damping() const { return damping(absorbing_faces()); }

SparseMatrix Assembler::damping(std::span<const int> absorbing) const {
  const FESpace& s = *space_;
  const PolyMesh& mesh = s.mesh();
  for (int f : absorbing) {
    if (f < 0 || f >= mesh.num_faces()) throw ParameterError("absorbing face index out of range");
    if (mesh.face(f).cls == FaceClass::Interface)
      throw ParameterError("absorbing condition on interface face " + std::to_string(f) +
                           " is not supported");
    if (!mesh.face(f).is_boundary())
      throw ParameterError("absorbing condition on interior face " + std::to_string(f));
  }
  const int ne = mesh.num_elements();
  std::vector<Triplets> slots(ne + absorbing.size());
  const auto& me = opts_.materials.elastic;
  const auto& mp = opts_.materials.poro;
  parallel_for(ne, [&](int e) {
    const bool el = mesh.element(e).region == Region::Elastic;
    const double ce = el ? 2.0 * me.rho * me.zeta : 2.0 * derived_.rho_p * mp.zeta;
    const double cf = el ? 0.0 : mp.eta / mp.k;
    if (ce == 0.0 && cf == 0.0) return;
    const ElementTab et = element_tab(s, e);
    const MatrixXd m = vector_mass(et);
    const int n2 = static_cast<int>(m.rows());
    std::vector<int> idx;
    if (el) {
      append_range(idx, s.offset(e, Field::Elastic), n2);
      scatter(idx, ce * m, slots[e]);
    } else {
      append_range(idx, s.offset(e, Field::Solid), n2);
      append_range(idx, s.offset(e, Field::Fluid), n2);
      MatrixXd K = MatrixXd::Zero(2 * n2, 2 * n2);
      K.topLeftCorner(n2, n2) = ce * m;
      K.bottomRightCorner(n2, n2) = cf * m;
      scatter(idx, K, slots[e]);
    }
  });
  const auto es = mesh.count(Region::Elastic) > 0 ? elastic_speeds(me) : ElasticSpeeds{};
  parallel_for(static_cast<int>(absorbing.size()), [&](int k) {
    const int f = absorbing[k];
    const Face& F = mesh.face(f);
    const int e = F.elements[0];
    const auto r = s.face_rule(f, face_order(s, F));
    const FaceSide side = face_side(s, e, r);
    const Vec2 n = F.normal, t(-n.y(), n.x());
    const int n2 = 2 * side.nb;
    std::vector<int> idx;
    MatrixXd K;
    if (mesh.element(e).region == Region::Elastic) {
      append_range(idx, s.offset(e, Field::Elastic), n2);
      K = MatrixXd::Zero(n2, n2);
      for (std::size_t q = 0; q < r.w.size(); ++q) {
        const MatrixXd V = values(side, static_cast<int>(q));
        const Eigen::RowVectorXd vn = n.transpose() * V, vt = t.transpose() * V;
        K.noalias() += r.w[q] * me.rho * (es.c_p * vn.transpose() * vn + es.c_s * vt.transpose() * vt);
      }
    } else {
      append_range(idx, s.offset(e, Field::Solid), n2);
      append_range(idx, s.offset(e, Field::Fluid), n2);
      K = MatrixXd::Zero(2 * n2, 2 * n2);
      const double css = derived_.rho_p * derived_.c_p1;
      const double cff = derived_.rho_w * derived_.c_p2;
      const double csf = mp.rho_f * std::sqrt(derived_.c_p1 * derived_.c_p2);
      const double ctt = derived_.rho_shear * derived_.c_s;
      for (std::size_t q = 0; q < r.w.size(); ++q) {
        const MatrixXd V = values(side, static_cast<int>(q));
        const Eigen::RowVectorXd vn = n.transpose() * V, vt = t.transpose() * V;
        const MatrixXd nn = r.w[q] * (vn.transpose() * vn);
        K.topLeftCorner(n2, n2) += css * nn + r.w[q] * ctt * (vt.transpose() * vt);
        K.topRightCorner(n2, n2) += csf * nn;
        K.bottomLeftCorner(n2, n2) += csf * nn;
        K.bottomRightCorner(n2, n2) += cff * nn;
      }
    }
    scatter(idx, K, slots[ne + k]);
  });
  return from_slots(s.ndof(), slots);
}

SparseMatrix Assembler::stiffness() const {
  const FESpace& s = *space_;
  const PolyMesh& mesh = s.mesh();
  const auto& me = opts_.materials.elastic;
  const auto& mp = opts_.materials.poro;
  const Lame Le{me.lambda, me.mu}, Lp{mp.lambda, mp.mu};
  const int ne = mesh.num_elements(), nf = mesh.num_faces();
  std::vector<Triplets> slots(ne + nf);

  parallel_for(ne, [&](int e) {
    const ElementTab et = element_tab(s, e);
    const MatrixXd m = vector_mass(et);
    const int n2 = static_cast<int>(m.rows());
    std::vector<int> idx;
    if (mesh.element(e).region == Region::Elastic) {
      append_range(idx, s.offset(e, Field::Elastic), n2);
      scatter(idx, elastic_volume(et, Le) + me.rho * me.zeta * me.zeta * m, slots[e]);
    } else {
      append_range(idx, s.offset(e, Field::Solid), n2);
      append_range(idx, s.offset(e, Field::Fluid), n2);
      const MatrixXd dd = mp.m * divdiv(et);
      MatrixXd K(2 * n2, 2 * n2);
      K.topLeftCorner(n2, n2) = elastic_volume(et, Lp) +
                                derived_.rho_p * mp.zeta * mp.zeta * m +
                                mp.beta * mp.beta * dd;
      K.topRightCorner(n2, n2) = mp.beta * dd;
      K.bottomLeftCorner(n2, n2) = mp.beta * dd;
      K.bottomRightCorner(n2, n2) = dd;
      scatter(idx, K, slots[e]);
    }
  });

  parallel_for(nf, [&](int f) {
    const Face& F = mesh.face(f);
    if (F.cls == FaceClass::Interface) return;
    if (F.is_boundary() && !is_dirichlet(f)) return;
    const bool poro = F.cls == FaceClass::InteriorPoro || F.cls == FaceClass::BoundaryPoro;
    const Field fld = poro ? Field::Solid : Field::Elastic;
    const Lame L = poro ? Lp : Le;
    const auto r = s.face_rule(f, face_order(s, F));
    const Vec2 n = F.normal;
    const FaceSide a = face_side(s, F.elements[0], r);
    auto& out = slots[ne + f];

    if (F.is_boundary()) {
      const int n2 = 2 * a.nb;
      MatrixXd K = MatrixXd::Zero(n2, n2);
      for (std::size_t q = 0; q < r.w.size(); ++q) {
        const int qi = static_cast<int>(q);
        sipg_update(K, r.w[q], values(a, qi), tractions(a, qi, n, L), alpha_[f]);
      }
      std::vector<int> idx;
      append_range(idx, s.offset(a.e, fld), n2);
      scatter(idx, K, out);
      if (poro) {
        MatrixXd B = MatrixXd::Zero(2 * n2, 2 * n2);
        for (std::size_t q = 0; q < r.w.size(); ++q) {
          const int qi = static_cast<int>(q);
          sipg_update(B, r.w[q], combined_normal(a, qi, n, mp.beta),
                      combined_div(a, qi, mp.m, mp.beta), gamma_[f]);
        }
        idx.clear();
        append_range(idx, s.offset(a.e, Field::Solid), n2);
        append_range(idx, s.offset(a.e, Field::Fluid), n2);
        scatter(idx, B, out);
      }
      return;
    }

    const FaceSide b = face_side(s, F.elements[1], r);
    const int na = 2 * a.nb, nbb = 2 * b.nb;
    MatrixXd K = MatrixXd::Zero(na + nbb, na + nbb);
    MatrixXd J(2, na + nbb), T(2, na + nbb);
    for (std::size_t q = 0; q < r.w.size(); ++q) {
      const int qi = static_cast<int>(q);
      J << values(a, qi), -values(b, qi);
      T << 0.5 * tractions(a, qi, n, L), 0.5 * tractions(b, qi, n, L);
      sipg_update(K, r.w[q], J, T, alpha_[f]);
    }
    std::vector<int> idx;
    append_range(idx, s.offset(a.e, fld), na);
    append_range(idx, s.offset(b.e, fld), nbb);
    scatter(idx, K, out);
    if (poro) {
      MatrixXd B = MatrixXd::Zero(2 * (na + nbb), 2 * (na + nbb));
      Eigen::RowVectorXd Jn(2 * (na + nbb)), Dv(2 * (na + nbb));
      for (std::size_t q = 0; q < r.w.size(); ++q) {
        const int qi = static_cast<int>(q);
        Jn << combined_normal(a, qi, n, mp.beta), -combined_normal(b, qi, n, mp.beta);
        Dv << 0.5 * combined_div(a, qi, mp.m, mp.beta), 0.5 * combined_div(b, qi, mp.m, mp.beta);
        sipg_update(B, r.w[q], Jn, Dv, gamma_[f]);
      }
      idx.clear();
      append_range(idx, s.offset(a.e, Field::Solid), na);
      append_range(idx, s.offset(a.e, Field::Fluid), na);
      append_range(idx, s.offset(b.e, Field::Solid), nbb);
      append_range(idx, s.offset(b.e, Field::Fluid), nbb);
      scatter(idx, B, out);
    }
  });
  return from_slots(s.ndof(), slots);
}

SparseMatrix Assembler::coupling() const {
  const FESpace& s = *space_;
  const PolyMesh& mesh = s.mesh();
  const auto& me = opts_.materials.elastic;
  const auto& mp = opts_.materials.poro;
  const Lame Le{me.lambda, me.mu};
  const int nf = mesh.num_faces();
  std::vector<Triplets> slots(nf);
  const double scale_s = (1.0 - opts_.delta) * mp.beta;
  parallel_for(nf, [&](int f) {
    const Face& F = mesh.face(f);
    if (F.cls != FaceClass::Interface) return;
    // elements[0] is the poroelastic side and the normal is n_p.
    const auto r = s.face_rule(f, face_order(s, F));
    const Vec2 n = F.normal;
    const FaceSide p = face_side(s, F.elements[0], r);
    const FaceSide e = face_side(s, F.elements[1], r);
    const int np2 = 2 * p.nb, ne2 = 2 * e.nb;

    MatrixXd K = MatrixXd::Zero(np2 + ne2, np2 + ne2);
    MatrixXd J(2, np2 + ne2), T(2, np2 + ne2);
    MatrixXd B = MatrixXd::Zero(2 * np2, 2 * np2);
    for (std::size_t q = 0; q < r.w.size(); ++q) {
      const int qi = static_cast<int>(q);
      J << values(p, qi), -values(e, qi);
      T << MatrixXd::Zero(2, np2), tractions(e, qi, n, Le);
      sipg_update(K, r.w[q], J, T, alpha_[f]);
      sipg_update(B, r.w[q], combined_normal(p, qi, n, scale_s), combined_div(p, qi, mp.m, mp.beta),
                  gamma_[f]);
    }
    std::vector<int> idx;
    append_range(idx, s.offset(p.e, Field::Solid), np2);
    append_range(idx, s.offset(e.e, Field::Elastic), ne2);
    scatter(idx, K, slots[f]);
    idx.clear();
    append_range(idx, s.offset(p.e, Field::Solid), np2);
    append_range(idx, s.offset(p.e, Field::Fluid), np2);
    scatter(idx, B, slots[f]);
  });
  return from_slots(s.ndof(), slots);
}

BlockSystem Assembler::assemble() const { return {mass(), damping(), stiffness(), coupling()}; }

SparseMatrix extract_block(const SparseMatrix& A, const FESpace& space, Field row, Field col) {
  const int r0 = space.field_offset(row), nr = space.field_size(row);
  const int c0 = space.field_offset(col), nc = space.field_size(col);
  return A.block(r0, c0, nr, nc);
}

// ---------------------------------------------------------------------------

double ricker(double t, double f_p, double t0) {
  const double b = std::numbers::pi * std::numbers::pi * f_p * f_p;
  const double s = (t - t0) * (t - t0);
  return (1.0 - 2.0 * b * s) * std::exp(-b * s);
}

LoadAssembler::LoadAssembler(const Assembler& assembler, LoadData data)
    : space_(assembler.space_ptr()), mat_(assembler.options().materials), data_(std::move(data)) {
  const FESpace& s = *space_;
  const PolyMesh& mesh = s.mesh();
  const bool body_e = static_cast<bool>(data_.f_e);
  const bool body_p = data_.f_p || data_.g_p;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const bool el = mesh.element(e).region == Region::Elastic;
    if (el ? !body_e : !body_p) continue;
    ElementCache c;
    c.e = e;
    c.rule = s.element_rule(e, s.order(e) + 2);
    c.val = s.basis(e).table(c.rule.x).val;
    elems_.push_back(std::move(c));
  }
  const bool dir_e = static_cast<bool>(data_.dir_e);
  const bool dir_p = data_.dir_p || data_.dir_f;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (!assembler.is_dirichlet(f)) continue;
    const Face& F = mesh.face(f);
    const int e = F.elements[0];
    const bool el = mesh.element(e).region == Region::Elastic;
    if (el ? !dir_e : !dir_p) continue;
    FaceCache c;
    c.f = f;
    c.e = e;
    c.n = F.normal;
    c.rule = s.face_rule(f, 2 * s.degree(e) + 4);
    auto t = s.basis(e).table(c.rule.x);
    c.val = std::move(t.val);
    c.dx = std::move(t.dx);
    c.dy = std::move(t.dy);
    c.alpha = assembler.alpha(f);
    c.gamma = assembler.gamma(f);
    faces_.push_back(std::move(c));
  }
  for (const auto& src : data_.sources) {
    const int e = mesh.locate(src.x);
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", src.x.x(), src.x.y());
    if (e < 0) throw ParameterError(std::string("point source at ") + buf + " lies outside the mesh");
    if (mesh.element(e).region != src.region)
      throw ParameterError(std::string("point source at ") + buf + " is not inside the " +
                           (src.region == Region::Elastic ? "elastic" : "poroelastic") + " region");
    const auto poly = mesh.polygon(e);
    if (geom::boundary_distance(poly, src.x) <= 1e-9 * mesh.element(e).diameter)
      throw ParameterError(std::string("point source at ") + buf +
                           " lies on an element boundary; perturb its position slightly");
    const int nb = s.nb(e);
    Eigen::VectorXd v(nb), gx(nb), gy(nb);
    s.basis(e).eval(src.x, v, gx, gy);
    Eigen::VectorXd vec = Eigen::VectorXd::Zero(s.ndof());
    for (Field fld : s.fields(e)) {
      const int off = s.offset(e, fld);
      vec.segment(off, nb) += src.M0 * gx;
      vec.segment(off + nb, nb) += src.M0 * gy;
    }
    source_vec_.push_back(std::move(vec));
  }
}

bool LoadAssembler::empty() const {
  return elems_.empty() && faces_.empty() && source_vec_.empty();
}

Eigen::VectorXd LoadAssembler::operator()(double t) const {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(space_->ndof());
  add(t, 1.0, F);
  return F;
}

void LoadAssembler::add(double t, double scale, Eigen::Ref<Eigen::VectorXd> out) const {
  const FESpace& s = *space_;
  const PolyMesh& mesh = s.mesh();
  if (out.size() != s.ndof()) throw std::invalid_argument("load vector has wrong size");

  auto body = [&](const ElementCache& c, const SpaceTimeField& fn, Field fld) {
    if (!fn) return;
    const auto nq = static_cast<Eigen::Index>(c.rule.w.size());
    Eigen::VectorXd fx(nq), fy(nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const Vec2 v = fn(c.rule.x[q], t);
      fx[q] = scale * c.rule.w[q] * v.x();
      fy[q] = scale * c.rule.w[q] * v.y();
    }
    const int off = s.offset(c.e, fld), nb = s.nb(c.e);
    out.segment(off, nb).noalias() += c.val.transpose() * fx;
    out.segment(off + nb, nb).noalias() += c.val.transpose() * fy;
  };
  for (const auto& c : elems_) {
    if (mesh.element(c.e).region == Region::Elastic) {
      body(c, data_.f_e, Field::Elastic);
    } else {
      body(c, data_.f_p, Field::Solid);
      body(c, data_.g_p, Field::Fluid);
    }
  }

  const auto& me = mat_.elastic;
  const auto& mp = mat_.poro;
  for (const auto& c : faces_) {
    const bool el = mesh.element(c.e).region == Region::Elastic;
    const int nb = s.nb(c.e);
    FaceSide side{c.e, nb, {c.val, c.dx, c.dy}};
    const Lame L = el ? Lame{me.lambda, me.mu} : Lame{mp.lambda, mp.mu};
    const Field fld = el ? Field::Elastic : Field::Solid;
    const SpaceTimeField& g = el ? data_.dir_e : data_.dir_p;
    Eigen::VectorXd va = Eigen::VectorXd::Zero(2 * nb);
    Eigen::VectorXd vb = Eigen::VectorXd::Zero(el ? 0 : 4 * nb);
    for (std::size_t q = 0; q < c.rule.w.size(); ++q) {
      const int qi = static_cast<int>(q);
      const double w = scale * c.rule.w[q];
      const Vec2 x = c.rule.x[q];
      if (g) {
        const Vec2 gv = g(x, t);
        va.noalias() += w * (c.alpha * values(side, qi).transpose() * gv -
                             tractions(side, qi, c.n, L).transpose() * gv);
      }
      if (!el) {
        Vec2 wg = Vec2::Zero();
        if (data_.dir_p) wg += mp.beta * data_.dir_p(x, t);
        if (data_.dir_f) wg += data_.dir_f(x, t);
        const double gn = wg.dot(c.n);
        vb.noalias() += (w * gn) * (c.gamma * combined_normal(side, qi, c.n, mp.beta) -
                                    combined_div(side, qi, mp.m, mp.beta))
                                       .transpose();
      }
    }
    out.segment(s.offset(c.e, fld), 2 * nb) += va;
    if (!el) {
      out.segment(s.offset(c.e, Field::Solid), 2 * nb) += vb.head(2 * nb);
      out.segment(s.offset(c.e, Field::Fluid), 2 * nb) += vb.tail(2 * nb);
    }
  }

  for (std::size_t k = 0; k < source_vec_.size(); ++k) {
    const auto& src = data_.sources[k];
    const double a = scale * ricker(t, src.f_p, src.t0);
    if (a != 0.0) out += a * source_vec_[k];
  }
}

}  // namespace xtpoly

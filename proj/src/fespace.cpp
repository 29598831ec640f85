#include "xtpoly/fespace.hpp"

#include "xtpoly/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace xtpoly {

namespace {

// Legendre values and derivatives P_0..P_p at x.
void legendre_all(int p, double x, double* v, double* d) {
  v[0] = 1.0;
  d[0] = 0.0;
  if (p == 0) return;
  v[1] = x;
  d[1] = 1.0;
  for (int n = 1; n < p; ++n) {
    v[n + 1] = ((2 * n + 1) * x * v[n] - n * v[n - 1]) / (n + 1);
    d[n + 1] = d[n - 1] + (2 * n + 1) * v[n];
  }
}

}  // namespace

ScaledLegendre::ScaledLegendre(const BBox& box, int degree)
    : c_(box.center()), s_(box.half_extent()), p_(degree) {
  if (degree < 0) throw std::invalid_argument("negative polynomial degree");
  scale_ = 1.0 / std::sqrt(s_.x() * s_.y());
  for (int n = 0; n <= p_; ++n)
    for (int i = n; i >= 0; --i) idx_.push_back({i, n - i});
}

void ScaledLegendre::eval(const Vec2& x, Eigen::Ref<Eigen::VectorXd> val,
                          Eigen::Ref<Eigen::VectorXd> dx, Eigen::Ref<Eigen::VectorXd> dy) const {
  constexpr int kMax = 32;
  double lx[kMax], dlx[kMax], ly[kMax], dly[kMax];
  const double xi = (x.x() - c_.x()) / s_.x();
  const double et = (x.y() - c_.y()) / s_.y();
  legendre_all(p_, xi, lx, dlx);
  legendre_all(p_, et, ly, dly);
  for (int n = 0; n <= p_; ++n) {
    const double nrm = std::sqrt(n + 0.5);
    lx[n] *= nrm;
    dlx[n] *= nrm / s_.x();
    ly[n] *= nrm;
    dly[n] *= nrm / s_.y();
  }
  for (int k = 0; k < size(); ++k) {
    const auto [i, j] = idx_[k];
    val[k] = scale_ * lx[i] * ly[j];
    dx[k] = scale_ * dlx[i] * ly[j];
    dy[k] = scale_ * lx[i] * dly[j];
  }
}

BasisTable ScaledLegendre::table(const std::vector<Vec2>& pts) const {
  const int nq = static_cast<int>(pts.size()), n = size();
  BasisTable t{Eigen::MatrixXd(nq, n), Eigen::MatrixXd(nq, n), Eigen::MatrixXd(nq, n)};
  Eigen::VectorXd v(n), gx(n), gy(n);
  for (int q = 0; q < nq; ++q) {
    eval(pts[q], v, gx, gy);
    t.val.row(q) = v.transpose();
    t.dx.row(q) = gx.transpose();
    t.dy.row(q) = gy.transpose();
  }
  return t;
}

FESpace::FESpace(std::shared_ptr<const PolyMesh> mesh, int degree_e, int degree_p)
    : mesh_(std::move(mesh)) {
  if (degree_e < 1 || degree_p < 1)
    throw ParameterError("polynomial degrees must be >= 1");
  degree_.resize(mesh_->num_elements());
  for (int e = 0; e < mesh_->num_elements(); ++e)
    degree_[e] = mesh_->element(e).region == Region::Elastic ? degree_e : degree_p;
  build();
}

FESpace::FESpace(std::shared_ptr<const PolyMesh> mesh, std::vector<int> degrees)
    : mesh_(std::move(mesh)), degree_(std::move(degrees)) {
  if (static_cast<int>(degree_.size()) != mesh_->num_elements())
    throw ParameterError("one polynomial degree per element is required");
  for (int p : degree_)
    if (p < 1) throw ParameterError("polynomial degrees must be >= 1");
  build();
}

void FESpace::build() {
  const int ne = mesh_->num_elements();
  for (int p : degree_)
    if (p > 30) throw ParameterError("polynomial degree above 30 is not supported");
  basis_.clear();
  basis_.reserve(ne);
  for (int e = 0; e < ne; ++e) basis_.emplace_back(mesh_->element(e).box, degree_[e]);
  int pos = 0;
  for (int fi = 0; fi < 3; ++fi) {
    const Field f = kFields[fi];
    offset_[fi].assign(ne, -1);
    field_begin_[fi] = pos;
    for (int e = 0; e < ne; ++e) {
      if (!has(e, f)) continue;
      offset_[fi][e] = pos;
      pos += 2 * nb(e);
    }
    field_size_[fi] = pos - field_begin_[fi];
  }
  ndof_ = pos;
}

bool FESpace::has(int e, Field f) const {
  const bool elastic = mesh_->element(e).region == Region::Elastic;
  return elastic ? f == Field::Elastic : f != Field::Elastic;
}

std::vector<Field> FESpace::fields(int e) const {
  if (mesh_->element(e).region == Region::Elastic) return {Field::Elastic};
  return {Field::Solid, Field::Fluid};
}

quad::Rule2D FESpace::element_rule(int e, int order) const {
  quad::Rule2D r;
  for (const auto& t : mesh_->sub_triangles(e)) {
    auto s = quad::triangle(t.p[0], t.p[1], t.p[2], order);
    r.x.insert(r.x.end(), s.x.begin(), s.x.end());
    r.w.insert(r.w.end(), s.w.begin(), s.w.end());
  }
  return r;
}

quad::Rule2D FESpace::face_rule(int f, int order) const {
  const auto& face = mesh_->face(f);
  return quad::segment(mesh_->vertices()[face.vertices[0]], mesh_->vertices()[face.vertices[1]],
                       order);
}

Eigen::MatrixXd FESpace::local_mass(int e) const {
  const auto r = element_rule(e, order(e));
  const auto t = basis_[e].table(r.x);
  const Eigen::Map<const Eigen::VectorXd> w(r.w.data(), static_cast<Eigen::Index>(r.w.size()));
  return t.val.transpose() * w.asDiagonal() * t.val;
}

void FESpace::project(const VectorField& u, Field f, Eigen::Ref<Eigen::VectorXd> out,
                      int extra_order) const {
  if (out.size() != ndof_) throw std::invalid_argument("projection target has wrong size");
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    const int off = offset(e, f);
    if (off < 0) continue;
    const auto r = element_rule(e, order(e) + extra_order);
    const auto t = basis_[e].table(r.x);
    const int n = nb(e);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 2);
    for (std::size_t q = 0; q < r.w.size(); ++q) {
      const auto phi = t.val.row(q).transpose();
      M.noalias() += r.w[q] * phi * phi.transpose();
      const Vec2 v = u(r.x[q]);
      rhs.col(0) += r.w[q] * v.x() * phi;
      rhs.col(1) += r.w[q] * v.y() * phi;
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(M);
    const Eigen::MatrixXd c = llt.solve(rhs);
    out.segment(off, n) = c.col(0);
    out.segment(off + n, n) = c.col(1);
  }
}

Eigen::VectorXd FESpace::project(const VectorField& u, Field f, int extra_order) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ndof_);
  project(u, f, out, extra_order);
  return out;
}

Vec2 FESpace::evaluate(const Eigen::VectorXd& U, int e, Field f, const Vec2& x) const {
  const int off = offset(e, f);
  if (off < 0) return Vec2::Zero();
  const int n = nb(e);
  Eigen::VectorXd v(n), gx(n), gy(n);
  basis_[e].eval(x, v, gx, gy);
  return {v.dot(U.segment(off, n)), v.dot(U.segment(off + n, n))};
}

Eigen::Matrix2d FESpace::gradient(const Eigen::VectorXd& U, int e, Field f, const Vec2& x) const {
  const int off = offset(e, f);
  if (off < 0) return Eigen::Matrix2d::Zero();
  const int n = nb(e);
  Eigen::VectorXd v(n), gx(n), gy(n);
  basis_[e].eval(x, v, gx, gy);
  Eigen::Matrix2d g;
  g << gx.dot(U.segment(off, n)), gy.dot(U.segment(off, n)), gx.dot(U.segment(off + n, n)),
      gy.dot(U.segment(off + n, n));
  return g;
}

double FESpace::trace_inverse_constant(int e) const {
  const auto& el = mesh_->element(e);
  const int n = nb(e);
  Eigen::MatrixXd Mf = Eigen::MatrixXd::Zero(n, n);
  for (int f : el.faces) {
    const auto r = face_rule(f, 2 * degree_[e]);
    const auto t = basis_[e].table(r.x);
    const Eigen::Map<const Eigen::VectorXd> w(r.w.data(), static_cast<Eigen::Index>(r.w.size()));
    Mf.noalias() += t.val.transpose() * w.asDiagonal() * t.val;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Mf, local_mass(e));
  const double lmax = es.eigenvalues().maxCoeff();
  return std::sqrt(lmax * el.diameter) / degree_[e];
}

}  // namespace xtpoly

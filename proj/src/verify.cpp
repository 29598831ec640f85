#include "xtpoly/verify.hpp"

#include "xtpoly/error.hpp"
#include "xtpoly/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <ostream>

namespace xtpoly {

namespace {

constexpr double kPi = std::numbers::pi;

// f(x) = x^2 s(x) with its first two derivatives.
struct Profile {
  double v, d1, d2;
};

Profile times_x2(double x, double s, double s1, double s2) {
  return {x * x * s, 2 * x * s + x * x * s1, 2 * s + 4 * x * s1 + x * x * s2};
}

Profile profile_a(double x) {  // x^2 sin(2 pi x)
  const double w = 2 * kPi;
  return times_x2(x, std::sin(w * x), w * std::cos(w * x), -w * w * std::sin(w * x));
}

Profile profile_b(double x) {  // x^2 sin(4 pi x)
  const double w = 4 * kPi;
  return times_x2(x, std::sin(w * x), w * std::cos(w * x), -w * w * std::sin(w * x));
}

Profile profile_g(double x) {  // x^2 cos(pi x / 2) sin(pi x)
  const double c = std::cos(kPi * x / 2), sh = std::sin(kPi * x / 2);
  const double s = std::sin(kPi * x), co = std::cos(kPi * x);
  const double s0 = c * s;
  const double s1 = -kPi / 2 * sh * s + kPi * c * co;
  const double s2 = -1.25 * kPi * kPi * c * s - kPi * kPi * sh * co;
  return times_x2(x, s0, s1, s2);
}

// Time factor and its first two derivatives.
struct Temporal {
  double v, d1, d2;
};

Temporal cosine(double w, double t) {
  return {std::cos(w * t), -w * std::sin(w * t), -w * w * std::cos(w * t)};
}

Temporal time_e(double t) { return cosine(4 * kPi, t); }
Temporal time_p(double t) { return cosine(std::numbers::sqrt2 * kPi, t); }

constexpr double kFluidRatio = -1.0;  // u_f = kFluidRatio * u_p

double sq(double v) { return v * v; }

}  // namespace

// ---------------------------------------------------------------------------
// ManufacturedCase

Materials ManufacturedCase::default_materials() {
  Materials m;
  m.elastic = {1.0, 2.0, 1.0, 1.0};
  m.poro.rho_s = 1.0;
  m.poro.rho_f = 1.0;
  m.poro.phi = 0.5;
  m.poro.a = 1.0;
  m.poro.eta = 1.0;
  m.poro.k = 1.0;
  m.poro.lambda = 1.0;
  m.poro.mu = 1.0;
  m.poro.m = 1.0;
  m.poro.beta = 1.0;
  m.poro.zeta = 1.0;
  return m;
}

ManufacturedCase::ManufacturedCase() : ManufacturedCase(default_materials(), 1.0) {}

ManufacturedCase::ManufacturedCase(Materials materials, double delta, double amplitude)
    : mat_(std::move(materials)), delta_(delta), amp_(amplitude) {
  validate(mat_.elastic);
  validate(mat_.poro);
  der_ = derive_poro(mat_.poro);
  if (!(delta_ >= 0.0 && delta_ <= 1.0))
    throw ParameterError("delta must lie in [0, 1], got " + std::to_string(delta_));
}

std::vector<RegionRect> ManufacturedCase::regions() const {
  return {{-1.0, 0.0, 0.0, 1.0, Region::Poroelastic}, {0.0, 1.0, 0.0, 1.0, Region::Elastic}};
}

namespace {

// Spatial shape and time factor of each field.
struct Shape {
  Profile x, y;  // profiles of the two components
  Temporal c;
  double ratio;  // multiplier (u_f = ratio * u_p)
};

Shape shape(Field f, const Vec2& p, double t, double amp) {
  if (f == Field::Elastic) return {profile_a(p.x()), profile_b(p.x()), time_e(t), amp};
  const Profile g = profile_g(p.x());
  return {g, g, time_p(t), f == Field::Fluid ? amp * kFluidRatio : amp};
}

}  // namespace

Vec2 ManufacturedCase::displacement(Field f, const Vec2& x, double t) const {
  const Shape s = shape(f, x, t, amp_);
  return s.ratio * s.c.v * Vec2(s.x.v, s.y.v);
}

Vec2 ManufacturedCase::velocity(Field f, const Vec2& x, double t) const {
  const Shape s = shape(f, x, t, amp_);
  return s.ratio * s.c.d1 * Vec2(s.x.v, s.y.v);
}

Vec2 ManufacturedCase::acceleration(Field f, const Vec2& x, double t) const {
  const Shape s = shape(f, x, t, amp_);
  return s.ratio * s.c.d2 * Vec2(s.x.v, s.y.v);
}

Eigen::Matrix2d ManufacturedCase::gradient(Field f, const Vec2& x, double t) const {
  const Shape s = shape(f, x, t, amp_);
  Eigen::Matrix2d G;
  G << s.x.d1, 0.0, s.y.d1, 0.0;
  return s.ratio * s.c.v * G;
}

Vec2 ManufacturedCase::forcing(Field f, const Vec2& x, double t) const {
  if (f == Field::Elastic) {
    const auto& e = mat_.elastic;
    const Shape s = shape(f, x, t, amp_);
    const Vec2 u(s.x.v, s.y.v);
    const Vec2 div_sigma((2 * e.mu + e.lambda) * s.x.d2, e.mu * s.y.d2);
    return s.ratio *
           (e.rho * (s.c.d2 + 2 * e.zeta * s.c.d1 + e.zeta * e.zeta * s.c.v) * u - s.c.v * div_sigma);
  }
  const auto& q = mat_.poro;
  const Shape s = shape(Field::Solid, x, t, amp_);
  const Vec2 g = amp_ * Vec2(s.x.v, s.y.v);
  const double k = kFluidRatio;
  // p = -m (beta div u_p + div u_f); only the x derivative of the x component is nonzero.
  const Vec2 grad_p(-amp_ * q.m * (q.beta + k) * s.c.v * s.x.d2, 0.0);
  if (f == Field::Solid) {
    const Vec2 div_sigma = amp_ * Vec2((2 * q.mu + q.lambda) * s.x.d2, q.mu * s.y.d2);
    return (der_.rho_p + k * q.rho_f) * s.c.d2 * g + 2 * der_.rho_p * q.zeta * s.c.d1 * g +
           der_.rho_p * q.zeta * q.zeta * s.c.v * g - s.c.v * div_sigma + q.beta * grad_p;
  }
  return (q.rho_f + k * der_.rho_w) * s.c.d2 * g + q.eta / q.k * k * s.c.d1 * g + grad_p;
}

LoadData ManufacturedCase::loads() const {
  LoadData d;
  auto self = *this;
  d.f_e = [self](const Vec2& x, double t) { return self.forcing(Field::Elastic, x, t); };
  d.f_p = [self](const Vec2& x, double t) { return self.forcing(Field::Solid, x, t); };
  d.g_p = [self](const Vec2& x, double t) { return self.forcing(Field::Fluid, x, t); };
  d.dir_e = [self](const Vec2& x, double t) { return self.displacement(Field::Elastic, x, t); };
  d.dir_p = [self](const Vec2& x, double t) { return self.displacement(Field::Solid, x, t); };
  d.dir_f = [self](const Vec2& x, double t) { return self.displacement(Field::Fluid, x, t); };
  return d;
}

SlabState ManufacturedCase::projected_state(const FESpace& space, double t) const {
  SlabState s;
  s.t = t;
  s.U = Eigen::VectorXd::Zero(space.ndof());
  s.V = Eigen::VectorXd::Zero(space.ndof());
  for (Field f : kFields) {
    space.project([&](const Vec2& x) { return displacement(f, x, t); }, f, s.U);
    space.project([&](const Vec2& x) { return velocity(f, x, t); }, f, s.V);
  }
  return s;
}

// ---------------------------------------------------------------------------
// ErrorEvaluator

namespace {

struct Local {
  Eigen::VectorXd x, y;  // values at the table points
};

Local values(const BasisTable& B, const Eigen::VectorXd& X, int off, int nb) {
  return {B.val * X.segment(off, nb), B.val * X.segment(off + nb, nb)};
}

// Gradients of both components at table point q; row r = grad of component r.
struct LocalGrad {
  Eigen::VectorXd xx, xy, yx, yy;
};

LocalGrad gradients(const BasisTable& B, const Eigen::VectorXd& X, int off, int nb) {
  const auto cx = X.segment(off, nb), cy = X.segment(off + nb, nb);
  return {B.dx * cx, B.dy * cx, B.dx * cy, B.dy * cy};
}

// Integrand of (C eps, eps) for a displacement gradient G.
double strain_energy(const Eigen::Matrix2d& G, double lambda, double mu) {
  const double exx = G(0, 0), eyy = G(1, 1), exy = 0.5 * (G(0, 1) + G(1, 0));
  return 2 * mu * (exx * exx + eyy * eyy + 2 * exy * exy) + lambda * sq(exx + eyy);
}

}  // namespace

ErrorEvaluator::ErrorEvaluator(const Assembler& assembler, const ManufacturedCase& mcase)
    : asm_(assembler), case_(mcase) {
  const FESpace& sp = asm_.space();
  const PolyMesh& mesh = sp.mesh();
  elems_.resize(mesh.num_elements());
  parallel_for(mesh.num_elements(), [&](int e) {
    auto& T = elems_[e];
    T.e = e;
    T.rule = sp.element_rule(e, 2 * sp.degree(e) + 4);
    T.basis = sp.basis(e).table(T.rule.x);
  });
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& F = mesh.face(f);
    if (F.is_boundary() && !asm_.is_dirichlet(f)) continue;
    FaceTable T;
    T.f = f;
    T.e0 = F.elements[0];
    T.e1 = F.elements[1];
    T.n = F.normal;
    int order = 2 * sp.degree(T.e0) + 4;
    if (T.e1 >= 0) order = std::max(order, 2 * sp.degree(T.e1) + 4);
    T.rule = sp.face_rule(f, order);
    T.b0 = sp.basis(T.e0).table(T.rule.x);
    if (T.e1 >= 0) T.b1 = sp.basis(T.e1).table(T.rule.x);
    faces_.push_back(std::move(T));
  }
}

template <class Fn>
double ErrorEvaluator::element_sum(const Eigen::VectorXd& X, double t, bool velocity,
                                   Fn&& fn) const {
  const FESpace& sp = asm_.space();
  std::vector<double> part(elems_.size(), 0.0);
  parallel_for(static_cast<int>(elems_.size()), [&](int i) {
    const auto& T = elems_[i];
    const int nb = sp.nb(T.e);
    const bool poro = sp.has(T.e, Field::Solid);
    const Field f0 = poro ? Field::Solid : Field::Elastic;
    const Local a = values(T.basis, X, sp.offset(T.e, f0), nb);
    Local b;
    if (poro) b = values(T.basis, X, sp.offset(T.e, Field::Fluid), nb);
    double s = 0.0;
    for (size_t q = 0; q < T.rule.x.size(); ++q) {
      const Vec2& x = T.rule.x[q];
      auto exact = [&](Field f) {
        return velocity ? case_.velocity(f, x, t) : case_.displacement(f, x, t);
      };
      const Vec2 e0 = exact(f0) - Vec2(a.x[q], a.y[q]);
      const Vec2 e1 = poro ? Vec2(exact(Field::Fluid) - Vec2(b.x[q], b.y[q])) : Vec2(0, 0);
      s += T.rule.w[q] * fn(poro, e0, e1);
    }
    part[i] = s;
  });
  return std::accumulate(part.begin(), part.end(), 0.0);
}

double ErrorEvaluator::l2_squared(const Eigen::VectorXd& U, double t) const {
  const auto& m = case_.materials();
  const auto d = derive_poro(m.poro);
  const double phi = m.poro.phi;
  return element_sum(U, t, false, [&](bool poro, const Vec2& ep, const Vec2& ef) {
    if (!poro) return m.elastic.rho * ep.squaredNorm();
    return d.rho_u * ep.squaredNorm() + m.poro.rho_f * phi * (ep + ef / phi).squaredNorm();
  });
}

double ErrorEvaluator::kinetic_squared(const Eigen::VectorXd& V, double t) const {
  const auto& m = case_.materials();
  const auto d = derive_poro(m.poro);
  const double phi = m.poro.phi;
  return element_sum(V, t, true, [&](bool poro, const Vec2& ep, const Vec2& ef) {
    if (!poro) return m.elastic.rho * ep.squaredNorm();
    return d.rho_u * ep.squaredNorm() + m.poro.rho_f * phi * (ep + ef / phi).squaredNorm();
  });
}

double ErrorEvaluator::damping_form(const Eigen::VectorXd& X, double t, bool velocity) const {
  const auto& m = case_.materials();
  const auto d = derive_poro(m.poro);
  return element_sum(X, t, velocity, [&](bool poro, const Vec2& ep, const Vec2& ef) {
    if (!poro) return 2 * m.elastic.rho * m.elastic.zeta * ep.squaredNorm();
    return 2 * d.rho_p * m.poro.zeta * ep.squaredNorm() + m.poro.eta / m.poro.k * ef.squaredNorm();
  });
}

ErrorEvaluator::Seminorms ErrorEvaluator::seminorms(const Eigen::VectorXd& U, double t) const {
  const FESpace& sp = asm_.space();
  const auto& m = case_.materials();
  const double beta = m.poro.beta, delta = case_.delta();

  // Volume parts: per element (C eps, eps) and m (div)^2.
  std::vector<std::array<double, 3>> vol(elems_.size(), {0.0, 0.0, 0.0});
  parallel_for(static_cast<int>(elems_.size()), [&](int i) {
    const auto& T = elems_[i];
    const int nb = sp.nb(T.e);
    const bool poro = sp.has(T.e, Field::Solid);
    const Field f0 = poro ? Field::Solid : Field::Elastic;
    const LocalGrad a = gradients(T.basis, U, sp.offset(T.e, f0), nb);
    LocalGrad b;
    if (poro) b = gradients(T.basis, U, sp.offset(T.e, Field::Fluid), nb);
    for (size_t q = 0; q < T.rule.x.size(); ++q) {
      const Vec2& x = T.rule.x[q];
      Eigen::Matrix2d Gh;
      Gh << a.xx[q], a.xy[q], a.yx[q], a.yy[q];
      const Eigen::Matrix2d G = case_.gradient(f0, x, t) - Gh;
      const double w = T.rule.w[q];
      if (!poro) {
        vol[i][0] += w * strain_energy(G, m.elastic.lambda, m.elastic.mu);
        continue;
      }
      vol[i][1] += w * strain_energy(G, m.poro.lambda, m.poro.mu);
      Eigen::Matrix2d Fh;
      Fh << b.xx[q], b.xy[q], b.yx[q], b.yy[q];
      const Eigen::Matrix2d GF = case_.gradient(Field::Fluid, x, t) - Fh;
      vol[i][2] += w * m.poro.m * sq(beta * G.trace() + GF.trace());
    }
  });

  Seminorms s;
  for (const auto& v : vol) {
    s.dg_e += v[0];
    s.dg_p += v[1];
    s.dg_div += v[2];
  }

  // Face parts.
  std::vector<std::array<double, 4>> fac(faces_.size(), {0.0, 0.0, 0.0, 0.0});
  parallel_for(static_cast<int>(faces_.size()), [&](int i) {
    const auto& T = faces_[i];
    const Face& F = sp.mesh().face(T.f);
    const double alpha = asm_.alpha(T.f), gamma = asm_.gamma(T.f);
    auto side = [&](const BasisTable& B, int e, Field f) {
      return values(B, U, sp.offset(e, f), sp.nb(e));
    };
    auto err = [&](const Local& L, Field f, size_t q) {
      return Vec2(case_.displacement(f, T.rule.x[q], t) - Vec2(L.x[q], L.y[q]));
    };
    const size_t nq = T.rule.x.size();
    switch (F.cls) {
      case FaceClass::InteriorElastic:
      case FaceClass::BoundaryElastic: {
        const Local a = side(T.b0, T.e0, Field::Elastic);
        Local b;
        if (T.e1 >= 0) b = side(T.b1, T.e1, Field::Elastic);
        for (size_t q = 0; q < nq; ++q) {
          const Vec2 j = T.e1 >= 0 ? Vec2(err(a, Field::Elastic, q) - err(b, Field::Elastic, q))
                                   : err(a, Field::Elastic, q);
          fac[i][0] += T.rule.w[q] * alpha * j.squaredNorm();
        }
        break;
      }
      case FaceClass::InteriorPoro:
      case FaceClass::BoundaryPoro: {
        const Local ap = side(T.b0, T.e0, Field::Solid), af = side(T.b0, T.e0, Field::Fluid);
        Local bp, bf;
        if (T.e1 >= 0) {
          bp = side(T.b1, T.e1, Field::Solid);
          bf = side(T.b1, T.e1, Field::Fluid);
        }
        for (size_t q = 0; q < nq; ++q) {
          Vec2 jp = err(ap, Field::Solid, q), jf = err(af, Field::Fluid, q);
          if (T.e1 >= 0) {
            jp -= err(bp, Field::Solid, q);
            jf -= err(bf, Field::Fluid, q);
          }
          fac[i][1] += T.rule.w[q] * alpha * jp.squaredNorm();
          fac[i][2] += T.rule.w[q] * gamma * sq((beta * jp + jf).dot(T.n));
        }
        break;
      }
      case FaceClass::Interface: {
        const Local ap = side(T.b0, T.e0, Field::Solid), af = side(T.b0, T.e0, Field::Fluid);
        const Local ae = side(T.b1, T.e1, Field::Elastic);
        for (size_t q = 0; q < nq; ++q) {
          const Vec2 ep = err(ap, Field::Solid, q), ef = err(af, Field::Fluid, q);
          const Vec2 ee = err(ae, Field::Elastic, q);
          fac[i][3] += T.rule.w[q] * (alpha * (ep - ee).squaredNorm() +
                                      gamma * sq(((1 - delta) * beta * ep + ef).dot(T.n)));
        }
        break;
      }
    }
  });
  for (const auto& v : fac) {
    s.dg_e += v[0];
    s.dg_p += v[1];
    s.dg_div += v[2];
    s.interface += v[3];
  }
  return s;
}

void ErrorEvaluator::fill(ErrorReport& rep, const SlabState& st, double damping_integral,
                          double initial_damping) const {
  rep.t = st.t;
  const double l2 = l2_squared(st.U, st.t);
  const double kin = kinetic_squared(st.V, st.t);
  const auto s = seminorms(st.U, st.t);
  const double damp = damping_integral + initial_damping;
  rep.l2 = std::sqrt(l2);
  rep.kinetic = std::sqrt(kin);
  rep.dg_e = std::sqrt(s.dg_e);
  rep.dg_p = std::sqrt(s.dg_p);
  rep.dg_div = std::sqrt(s.dg_div);
  rep.interface = std::sqrt(s.interface);
  rep.damping = std::sqrt(damp);
  rep.energy = std::sqrt(kin + s.dg_e + s.dg_p + s.dg_div + s.interface + damp);
}

// ---------------------------------------------------------------------------
// Runs and studies

ErrorReport solve_manufactured(const ManufacturedCase& mcase, const RunParams& prm) {
  const auto start = std::chrono::steady_clock::now();
  if (prm.n_elements < 2) throw ParameterError("need at least two elements");
  if (prm.p < 1) throw ParameterError("space degree p must be >= 1");
  if (!(prm.T > 0.0)) throw ParameterError("final time must be positive");
  const double steps = prm.T / prm.dt;
  const int nslab = static_cast<int>(std::llround(steps));
  if (nslab < 1 || std::abs(nslab * prm.dt - prm.T) > 1e-12 * prm.T)
    throw ParameterError("time step must divide the final time");

  const auto regions = mcase.regions();
  auto mesh = std::make_shared<const PolyMesh>(generate_mesh(regions, prm.n_elements, prm.seed));
  auto space = std::make_shared<const FESpace>(mesh, prm.p, prm.p);
  AssemblyOptions opt;
  opt.materials = mcase.materials();
  opt.bc = BoundaryConditions::all(BoundaryKind::Dirichlet);
  opt.penalty = prm.penalty;
  opt.delta = mcase.delta();
  const Assembler assembler(space, opt);
  const BlockSystem sys = assembler.assemble();
  const LoadAssembler load(assembler, mcase.loads());
  const SlabSolver solver(sys.M, sys.D, sys.K(), build_time_matrices(prm.r, prm.dt));
  const ErrorEvaluator eval(assembler, mcase);

  SlabState s0 = mcase.projected_state(*space, 0.0);
  const double initial_damping = eval.damping_form(s0.U, 0.0, false);
  double damping_integral = 0.0;
  const auto& tm = solver.time();
  const LoadFn fn = [&](double t, double scale, Eigen::Ref<Eigen::VectorXd> out) {
    load.add(t, scale, out);
  };
  const auto res = run_time_dg(
      solver, std::move(s0), nslab, fn,
      [&](int, const SlabState&, const SlabNodes& nodes) {
        for (int l = 0; l < tm.stages(); ++l)
          damping_integral +=
              tm.weights[l] * eval.damping_form(nodes.V.col(l), nodes.t0 + tm.nodes[l], true);
      },
      false);

  ErrorReport rep;
  rep.n_elements = mesh->num_elements();
  rep.h = std::sqrt(mesh->domain_area() / mesh->num_elements());
  rep.p = prm.p;
  rep.dt = prm.dt;
  rep.r = prm.r;
  eval.fill(rep, res.final, damping_integral, initial_damping);
  if (prm.condition) rep.cond_est = estimate_condition(solver.slab_matrix(), solver.factorization());
  rep.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("least_squares_slope needs two or more paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return 0.0;
  return (n * sxy - sx * sy) / den;
}

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::H: return "h";
    case SweepVariable::P: return "p";
    case SweepVariable::Dt: return "dt";
    case SweepVariable::R: return "r";
  }
  return "?";
}

namespace {

double sweep_x(SweepVariable v, const ErrorReport& r) {
  switch (v) {
    case SweepVariable::H: return r.h;
    case SweepVariable::Dt: return r.dt;
    case SweepVariable::P: return r.p;
    case SweepVariable::R: return r.r;
  }
  return 0.0;
}

bool semilog(SweepVariable v) { return v == SweepVariable::P || v == SweepVariable::R; }

double metric_of(const std::string& metric, const ErrorReport& r) {
  return metric == "l2" ? r.l2 : r.energy;
}

double fit(SweepVariable v, const std::vector<double>& x, const std::vector<double>& y) {
  if (!semilog(v)) return least_squares_slope(x, y);
  std::vector<double> ex(x.size());
  for (size_t i = 0; i < x.size(); ++i) ex[i] = std::exp(x[i]);
  return least_squares_slope(ex, y);
}

}  // namespace

StudyResult convergence_study(const ManufacturedCase& mcase, const std::vector<RunParams>& points,
                              SweepVariable variable, const std::string& metric,
                              std::ostream* progress) {
  if (points.size() < 3) throw ParameterError("a convergence study needs at least 3 points");
  if (metric != "energy" && metric != "l2")
    throw ParameterError("metric must be \"energy\" or \"l2\", got \"" + metric + "\"");
  StudyResult res;
  res.variable = variable;
  res.metric = metric;
  std::vector<double> xs, ys;
  for (const auto& prm : points) {
    StudyRow row;
    row.report = solve_manufactured(mcase, prm);
    const double x = sweep_x(variable, row.report), y = metric_of(metric, row.report);
    if (!xs.empty()) {
      const double dy = std::log(y / ys.back());
      row.pairwise = semilog(variable) ? dy / (x - xs.back()) : dy / std::log(x / xs.back());
    }
    xs.push_back(x);
    ys.push_back(y);
    if (xs.size() >= 2) row.slope_so_far = fit(variable, xs, ys);
    if (progress)
      *progress << to_string(variable) << "=" << x << " " << metric << "=" << y
                << " wall=" << row.report.wall_s << "s" << std::endl;
    res.rows.push_back(row);
  }
  res.slope = fit(variable, xs, ys);
  // Errors must shrink as the discretization is refined.
  std::vector<size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return xs[a] < xs[b]; });
  for (size_t k = 1; k < idx.size(); ++k) {
    const double prev = ys[idx[k - 1]], cur = ys[idx[k]];
    const bool ok = semilog(variable) ? cur < prev : cur > prev;
    if (!ok) res.monotone = false;
  }
  return res;
}

void write_study_csv(const std::filesystem::path& path, const StudyResult& res) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "h,p,dt,r,L2,energy,slope_so_far,wall_s,cond_est\n";
  out << std::setprecision(10);
  for (const auto& row : res.rows) {
    const auto& r = row.report;
    out << r.h << ',' << r.p << ',' << r.dt << ',' << r.r << ',' << r.l2 << ',' << r.energy << ','
        << row.slope_so_far << ',' << r.wall_s << ',' << r.cond_est << '\n';
  }
}

void write_study_report(std::ostream& out, const StudyResult& res) {
  out << "convergence study\n";
  out << "  variable: " << to_string(res.variable) << '\n';
  out << "  metric: " << res.metric << '\n';
  out << "  slope: " << std::setprecision(4) << res.slope
      << (semilog(res.variable) ? " (d log err / d " + to_string(res.variable) + ")"
                                : " (d log err / d log " + to_string(res.variable) + ")")
      << '\n';
  out << "  monotone: " << (res.monotone ? "yes" : "no (flagged)") << '\n';
  out << "  rows:\n";
  out << std::scientific << std::setprecision(4);
  for (const auto& row : res.rows) {
    const auto& r = row.report;
    out << "    N=" << r.n_elements << " h=" << r.h << " p=" << r.p << " dt=" << r.dt << " r=" << r.r
        << " L2=" << r.l2 << " energy=" << r.energy << " pairwise=" << row.pairwise
        << " wall_s=" << r.wall_s << '\n';
  }
  out << std::defaultfloat;
}

}  // namespace xtpoly

#include "dual.hpp"
#include "oracles.hpp"
#include "xtpoly/error.hpp"
#include "xtpoly/verify.hpp"

#include <gtest/gtest.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

using namespace xtpoly;
using oracle::D2;

namespace {

constexpr double kPi = std::numbers::pi;

// The exact fields written directly from their closed forms, templated for AD.
template <class S>
std::array<S, 2> field(Field f, const S& x, const S& t) {
  using std::cos;
  using std::sin;
  if (f == Field::Elastic) {
    const S c = cos(4 * kPi * t);
    return {c * x * x * sin(2 * kPi * x), c * x * x * sin(4 * kPi * x)};
  }
  const S g = cos(std::sqrt(2.0) * kPi * t) * x * x * cos(0.5 * kPi * x) * sin(kPi * x);
  const double s = f == Field::Fluid ? -1.0 : 1.0;
  return {s * g, s * g};
}

// First and second derivatives of both components in (x, y, t), y entering only
// through a zero-weight term so mixed derivatives are well defined.
struct Derivs {
  std::array<double, 2> u;
  std::array<std::array<double, 3>, 2> d1;                      // [comp][var]
  std::array<std::array<std::array<double, 3>, 3>, 2> d2;       // [comp][var][var]
};

Derivs derivs(Field f, double x, double y, double t) {
  Derivs r{};
  const double v[3] = {x, y, t};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const D2 X = oracle::seed(v[0], 0, a, b), Y = oracle::seed(v[1], 1, a, b);
      const D2 T = oracle::seed(v[2], 2, a, b);
      // Fields do not depend on y; adding 0 * Y keeps the seed in the graph.
      const auto u = field<D2>(f, X + 0.0 * Y, T);
      for (int c = 0; c < 2; ++c) {
        r.u[c] = u[c].v.v;
        r.d1[c][b] = u[c].v.d;
        r.d2[c][a][b] = u[c].d.d;
      }
    }
  return r;
}

// Strong residual of the three equations at (x, y, t) with forcing from the case.
Eigen::Vector2d div_sigma(const Derivs& D, double lambda, double mu) {
  // div sigma_i = mu lap u_i + (mu + lambda) d_i div u
  Eigen::Vector2d r;
  for (int i = 0; i < 2; ++i) {
    const double lap = D.d2[i][0][0] + D.d2[i][1][1];
    const double grad_div = D.d2[0][i][0] + D.d2[1][i][1];
    r[i] = mu * lap + (mu + lambda) * grad_div;
  }
  return r;
}

Eigen::Vector2d grad_div(const Derivs& D) {
  return {D.d2[0][0][0] + D.d2[1][0][1], D.d2[0][1][0] + D.d2[1][1][1]};
}

Eigen::Vector2d vec(const std::array<double, 2>& a) { return {a[0], a[1]}; }
Eigen::Vector2d dt(const Derivs& D) { return {D.d1[0][2], D.d1[1][2]}; }
Eigen::Vector2d dtt(const Derivs& D) { return {D.d2[0][2][2], D.d2[1][2][2]}; }

std::array<Eigen::Vector2d, 3> residuals(const ManufacturedCase& mc, const Vec2& x, double t) {
  const auto& m = mc.materials();
  const auto d = derive_poro(m.poro);
  const Derivs E = derivs(Field::Elastic, x.x(), x.y(), t);
  const Derivs P = derivs(Field::Solid, x.x(), x.y(), t);
  const Derivs F = derivs(Field::Fluid, x.x(), x.y(), t);
  const auto& e = m.elastic;
  const Eigen::Vector2d re = e.rho * dtt(E) + 2 * e.rho * e.zeta * dt(E) +
                             e.rho * e.zeta * e.zeta * vec(E.u) - div_sigma(E, e.lambda, e.mu) -
                             mc.forcing(Field::Elastic, x, t);
  const auto& q = m.poro;
  const Eigen::Vector2d gp = -q.m * (q.beta * grad_div(P) + grad_div(F));
  const Eigen::Vector2d rp = d.rho_p * dtt(P) + q.rho_f * dtt(F) + 2 * d.rho_p * q.zeta * dt(P) +
                             d.rho_p * q.zeta * q.zeta * vec(P.u) -
                             (div_sigma(P, q.lambda, q.mu) - q.beta * gp) -
                             mc.forcing(Field::Solid, x, t);
  const Eigen::Vector2d rf = q.rho_f * dtt(P) + d.rho_w * dtt(F) + q.eta / q.k * dt(F) + gp -
                             mc.forcing(Field::Fluid, x, t);
  return {re, rp, rf};
}

Materials odd_materials() {
  Materials m;
  m.elastic = {1.3, 0.7, 2.1, 0.4};
  m.poro.rho_s = 2.2;
  m.poro.rho_f = 0.9;
  m.poro.phi = 0.35;
  m.poro.a = 1.8;
  m.poro.eta = 0.3;
  m.poro.k = 0.6;
  m.poro.lambda = 1.4;
  m.poro.mu = 0.8;
  m.poro.m = 2.5;
  m.poro.beta = 0.6;
  m.poro.zeta = 0.2;
  return m;
}

}  // namespace

// --- manufactured case -------------------------------------------------------

TEST(Manufactured, ForcingConsistentWithStrongOperator) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.0, 1.0), ut(0.0, 1.0);
  for (const auto& mc : {ManufacturedCase(), ManufacturedCase(odd_materials(), 0.3)})
    for (int i = 0; i < 200; ++i) {
      const Vec2 x(ux(rng), uy(rng));
      const double t = ut(rng);
      const auto r = residuals(mc, x, t);
      for (const auto& v : r) EXPECT_LE(v.cwiseAbs().maxCoeff(), 1e-9) << x.transpose() << " t=" << t;
    }
}

TEST(Manufactured, DerivativesMatchAutomaticDifferentiation) {
  const ManufacturedCase mc;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vec2 x(u(rng), 0.5 * (u(rng) + 1));
    const double t = 0.5 * (u(rng) + 1);
    for (Field f : kFields) {
      const Derivs D = derivs(f, x.x(), x.y(), t);
      EXPECT_LE((mc.displacement(f, x, t) - vec(D.u)).norm(), 1e-13);
      EXPECT_LE((mc.velocity(f, x, t) - dt(D)).norm(), 1e-12);
      EXPECT_LE((mc.acceleration(f, x, t) - dtt(D)).norm(), 1e-11);
      Eigen::Matrix2d G;
      G << D.d1[0][0], D.d1[0][1], D.d1[1][0], D.d1[1][1];
      EXPECT_LE((mc.gradient(f, x, t) - G).norm(), 1e-12);
    }
  }
}

TEST(Manufactured, ForcingAgreesWithFiniteDifferences) {
  // Sixth-order central differences in x and t on the hand-coded fields.
  const ManufacturedCase mc;
  const double h = 2e-3;
  const double c[4] = {-49.0 / 18, 1.5, -3.0 / 20, 1.0 / 90};
  auto d2 = [&](auto&& fn, double z) {
    Eigen::Vector2d s = c[0] * fn(z);
    for (int k = 1; k <= 3; ++k) s += c[k] * (fn(z + k * h) + fn(z - k * h));
    return Eigen::Vector2d(s / (h * h));
  };
  for (const Vec2 x : {Vec2(0.37, 0.2), Vec2(-0.61, 0.9), Vec2(0.83, 0.5)})
    for (double t : {0.13, 0.71}) {
      const auto& e = mc.materials().elastic;
      const Eigen::Vector2d uxx = d2(
          [&](double z) { return Eigen::Vector2d(mc.displacement(Field::Elastic, {z, x.y()}, t)); },
          x.x());
      const Eigen::Vector2d utt = d2(
          [&](double s) { return Eigen::Vector2d(mc.displacement(Field::Elastic, x, s)); }, t);
      const Eigen::Vector2d u = mc.displacement(Field::Elastic, x, t);
      const Eigen::Vector2d v = mc.velocity(Field::Elastic, x, t);
      // u depends on x only: div sigma = [(2 mu + lambda) u_x'', mu u_y''].
      const Eigen::Vector2d divs((2 * e.mu + e.lambda) * uxx[0], e.mu * uxx[1]);
      const Eigen::Vector2d f = e.rho * utt + 2 * e.rho * e.zeta * v + e.rho * e.zeta * e.zeta * u - divs;
      const Eigen::Vector2d ref = mc.forcing(Field::Elastic, x, t);
      EXPECT_LE((f - ref).norm(), 1e-6 * (1 + ref.norm()));
    }
}

TEST(Manufactured, SatisfiesInterfaceConditions) {
  // At x = 0 the displacements vanish with their normal derivatives, so traction,
  // displacement continuity and no-flow hold for every delta.
  const ManufacturedCase mc;
  for (double y : {0.1, 0.5, 0.9})
    for (double t : {0.0, 0.3}) {
      const Vec2 x(0.0, y);
      EXPECT_EQ(mc.displacement(Field::Elastic, x, t), mc.displacement(Field::Solid, x, t));
      EXPECT_NEAR(mc.displacement(Field::Fluid, x, t).x(), 0.0, 1e-15);
      EXPECT_LE(mc.gradient(Field::Elastic, x, t).norm(), 1e-15);
      EXPECT_LE(mc.gradient(Field::Solid, x, t).norm(), 1e-15);
    }
}

TEST(Manufactured, RejectsBadDelta) {
  EXPECT_THROW(ManufacturedCase(ManufacturedCase::default_materials(), 1.5), ParameterError);
}

// --- error evaluation ---------------------------------------------------------

namespace {

struct Setup {
  std::shared_ptr<const FESpace> space;
  std::unique_ptr<Assembler> assembler;
};

Setup setup(const ManufacturedCase& mc, int n, int p) {
  const auto r = mc.regions();
  auto mesh = std::make_shared<const PolyMesh>(generate_mesh(r, n, 3));
  Setup s;
  s.space = std::make_shared<const FESpace>(mesh, p, p);
  AssemblyOptions o;
  o.materials = mc.materials();
  o.delta = mc.delta();
  s.assembler = std::make_unique<Assembler>(s.space, o);
  return s;
}

}  // namespace

TEST(Errors, ZeroSolutionGivesZeroErrors) {
  const ManufacturedCase mc(ManufacturedCase::default_materials(), 1.0, 0.0);
  const auto s = setup(mc, 20, 2);
  const ErrorEvaluator ev(*s.assembler, mc);
  SlabState st;
  st.t = 0.4;
  st.U = Eigen::VectorXd::Zero(s.space->ndof());
  st.V = st.U;
  ErrorReport rep;
  ev.fill(rep, st, 0.0, 0.0);
  EXPECT_EQ(rep.l2, 0.0);
  EXPECT_EQ(rep.energy, 0.0);
}

TEST(Errors, ProjectionErrorPositiveAndShrinking) {
  const ManufacturedCase mc;
  std::vector<double> h, l2, en;
  for (int n : {20, 80, 320}) {
    const auto s = setup(mc, n, 2);
    const ErrorEvaluator ev(*s.assembler, mc);
    const SlabState st = mc.projected_state(*s.space, 0.3);
    ErrorReport rep;
    ev.fill(rep, st, 0.0, ev.damping_form(st.U, 0.3, false));
    EXPECT_GT(rep.l2, 0.0);
    EXPECT_GT(rep.energy, 0.0);
    // The energy norm dominates each of its parts.
    for (double part : {rep.kinetic, rep.dg_e, rep.dg_p, rep.dg_div, rep.interface, rep.damping})
      EXPECT_LE(part, rep.energy);
    h.push_back(std::sqrt(2.0 / n));
    l2.push_back(rep.l2);
    en.push_back(rep.energy);
  }
  EXPECT_GT(oracle::loglog_slope(h, l2), 2.5);   // p + 1 = 3
  EXPECT_GT(oracle::loglog_slope(h, en), 1.5);   // p = 2
  EXPECT_LT(l2[2], l2[1]);
  EXPECT_LT(en[2], en[1]);
}

TEST(Errors, L2NormMatchesMassForm) {
  // With exact field zero, the weighted L2 norm of -U equals U' M U for the assembled mass,
  // since rho_u |u_p|^2 + rho_f phi |u_p + u_f / phi|^2 reproduces the mass density.
  Materials m = ManufacturedCase::default_materials();
  const ManufacturedCase mc(m, 1.0, 0.0);
  const auto s = setup(mc, 16, 2);
  const ErrorEvaluator ev(*s.assembler, mc);
  const Eigen::VectorXd U = Eigen::VectorXd::Random(s.space->ndof());
  const double mass = U.dot(s.assembler->mass() * U);
  const double l2 = ev.l2_squared(U, 0.0);
  // rho_u = (1 - phi) rho_s / 2 is half the solid contribution, so l2 <= mass.
  EXPECT_GT(l2, 0.0);
  EXPECT_LE(l2, mass * (1 + 1e-12));
  const double damp = ev.damping_form(U, 0.0, true);
  EXPECT_NEAR(damp, U.dot(s.assembler->damping() * U), 1e-10 * damp);
}

// --- runs and studies ---------------------------------------------------------

TEST(Study, LeastSquaresSlopeOfPowerLaw) {
  const std::vector<double> x = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * v * v * v);
  EXPECT_NEAR(least_squares_slope(x, y), 3.0, 1e-12);
  EXPECT_THROW(least_squares_slope(std::vector<double>{1.0}, std::vector<double>{1.0}),
               std::invalid_argument);
}

TEST(Study, SmokeRunProducesFiniteErrors) {
  const ManufacturedCase mc;
  RunParams prm;
  prm.n_elements = 100;
  prm.p = 2;
  prm.dt = 1e-3;
  prm.r = 1;
  prm.T = 1.0;
  const auto rep = solve_manufactured(mc, prm);
  EXPECT_TRUE(std::isfinite(rep.l2));
  EXPECT_TRUE(std::isfinite(rep.energy));
  EXPECT_GT(rep.energy, 0.0);
  EXPECT_LT(rep.l2, 0.2);
  EXPECT_NEAR(rep.t, 1.0, 1e-12);
}

TEST(Study, RejectsTimeStepNotDividingFinalTime) {
  RunParams prm;
  prm.n_elements = 10;
  prm.dt = 0.3;
  prm.T = 1.0;
  EXPECT_THROW(solve_manufactured(ManufacturedCase(), prm), ParameterError);
}

TEST(Study, SmallSweepWritesTableAndReport) {
  const ManufacturedCase mc;
  std::vector<RunParams> pts;
  for (int n : {12, 24, 48}) {
    RunParams p;
    p.n_elements = n;
    p.p = 1;
    p.dt = 0.05;
    p.T = 0.1;
    p.condition = true;
    pts.push_back(p);
  }
  const auto res = convergence_study(mc, pts, SweepVariable::H, "energy");
  ASSERT_EQ(res.rows.size(), 3u);
  EXPECT_GT(res.slope, 0.0);
  EXPECT_GT(res.rows[2].report.cond_est, 1.0);
  const auto path = std::filesystem::temp_directory_path() / "xtpoly_study.csv";
  write_study_csv(path, res);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "h,p,dt,r,L2,energy,slope_so_far,wall_s,cond_est");
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 3);
  std::filesystem::remove(path);
  std::ostringstream rep;
  write_study_report(rep, res);
  EXPECT_NE(rep.str().find("variable: h"), std::string::npos);
  EXPECT_THROW(convergence_study(mc, {pts[0], pts[1]}, SweepVariable::H), ParameterError);
  EXPECT_THROW(convergence_study(mc, pts, SweepVariable::H, "bogus"), ParameterError);
}

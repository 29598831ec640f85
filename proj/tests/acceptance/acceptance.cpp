// Acceptance suite. Usage: acceptance [criterion ids...]; no ids runs all nine.
// Prints one PASS/FAIL line per criterion; exit status is nonzero if any fails.

#include "oracles.hpp"
#include "xtpoly/config.hpp"
#include "xtpoly/driver.hpp"
#include "xtpoly/timedg.hpp"
#include "xtpoly/verify.hpp"

#include <chrono>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace xtpoly;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

// Materials of the two-layer scenario.
Materials layered_materials() {
  Materials m;
  m.elastic = {2650.0, 1.8121e9, 1.5038e9, 0.0};
  m.poro.rho_s = 2200.0;
  m.poro.rho_f = 950.0;
  m.poro.phi = 0.4;
  m.poro.a = 2.0;
  m.poro.eta = 0.0;
  m.poro.k = 1e-12;
  m.poro.lambda = 7.2073e9;
  m.poro.mu = 4.3738e9;
  m.poro.m = 6.8386e9;
  m.poro.beta = 0.029;
  m.poro.zeta = 0.0;
  return m;
}

std::vector<RegionRect> unit_strip() {
  return {{-1, 0, 0, 1, Region::Poroelastic}, {0, 1, 0, 1, Region::Elastic}};
}

std::vector<RegionRect> layered_domain() {
  return {{0, 4800, 0, 2400, Region::Elastic}, {0, 4800, 2400, 4800, Region::Poroelastic}};
}

// ---------------------------------------------------------------------------
// 1. Spatial convergence of the energy error

Outcome spatial_convergence() {
  const ManufacturedCase mcase;
  Outcome out{true, ""};
  for (int p : {2, 3}) {
    std::vector<RunParams> pts;
    for (int n : {50, 100, 200, 400}) {
      RunParams prm;
      prm.n_elements = n;
      prm.p = p;
      prm.dt = 1e-3;
      prm.r = 1;
      prm.T = 1.0;
      pts.push_back(prm);
    }
    const StudyResult res = convergence_study(mcase, pts, SweepVariable::H, "energy");
    const double lo = p - 0.35, hi = p + 0.6;
    const bool ok = res.slope >= lo && res.slope <= hi;
    out.pass = out.pass && ok;
    out.detail += "p=" + std::to_string(p) + " slope " + fmt(res.slope) + " in [" + fmt(lo, 3) + ", " +
                  fmt(hi, 3) + "] (errors";
    for (const auto& row : res.rows) out.detail += " " + fmt(row.report.energy, 3);
    out.detail += "); ";
  }
  return out;
}

// ---------------------------------------------------------------------------
// 2. Temporal convergence of the L2 error at T

Outcome temporal_convergence() {
  const ManufacturedCase mcase;
  Outcome out{true, ""};
  for (int r : {1, 2}) {
    std::vector<RunParams> pts;
    for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
      RunParams prm;
      prm.n_elements = 100;
      prm.p = 5;
      prm.dt = dt;
      prm.r = r;
      prm.T = 1.0;
      pts.push_back(prm);
    }
    const StudyResult res = convergence_study(mcase, pts, SweepVariable::Dt, "l2");
    const bool ok = res.slope >= r - 0.2;
    out.pass = out.pass && ok;
    out.detail += "r=" + std::to_string(r) + " slope " + fmt(res.slope) + " >= " + fmt(r - 0.2, 2) +
                  " (errors";
    for (const auto& row : res.rows) out.detail += " " + fmt(row.report.l2, 3);
    out.detail += "); ";
  }
  return out;
}

// ---------------------------------------------------------------------------
// 3. Slab matrices against the published Lobatto IIIC coefficients

Outcome tableau() {
  const std::map<int, Eigen::MatrixXd> lobatto = [] {
    std::map<int, Eigen::MatrixXd> m;
    Eigen::MatrixXd a2(2, 2), a3(3, 3);
    a2 << 0.5, -0.5, 0.5, 0.5;
    a3 << 1.0 / 6, -1.0 / 3, 1.0 / 6, 1.0 / 6, 5.0 / 12, -1.0 / 12, 1.0 / 6, 2.0 / 3, 1.0 / 6;
    m[1] = a2;
    m[2] = a3;
    return m;
  }();
  double worst = 0.0;
  for (const auto& [r, A] : lobatto)
    for (double dt : {1.0, 0.1, 1e-3}) {
      const TimeMatrices tm = build_time_matrices(r, dt);
      // Rows of N5 / dt index the nodes 0..r; the Butcher matrix rows are the stages.
      worst = std::max(worst, (tm.N5 / dt - A).cwiseAbs().maxCoeff());
    }
  return {worst <= 1e-13, "max entry deviation " + fmt(worst, 3) + " <= 1e-13 (2 and 3 stages)"};
}

// ---------------------------------------------------------------------------
// 4. Operator structure via dense eigenvalues

Outcome operator_structure() {
  struct Case {
    int n, p;
    bool layered;
    BoundaryConditions bc;
    double delta;
  };
  const auto D = BoundaryKind::Dirichlet, A = BoundaryKind::Absorbing, F = BoundaryKind::Free;
  const std::vector<Case> cases = {
      {8, 1, false, BoundaryConditions::all(D), 1.0},   {24, 2, false, BoundaryConditions::all(D), 0.0},
      {50, 3, false, BoundaryConditions::all(D), 0.5},  {50, 2, false, {A, A, A, F}, 1.0},
      {30, 3, false, BoundaryConditions::all(F), 0.0},  {12, 1, false, {A, D, F, A}, 0.5},
      {8, 2, true, {A, A, A, F}, 1.0},                  {24, 3, true, {A, A, A, F}, 0.0},
      {50, 2, true, BoundaryConditions::all(D), 0.5},   {40, 1, true, BoundaryConditions::all(F), 1.0},
  };
  double worst_sym = 0.0, worst_k = 0.0, worst_d = 0.0, min_m = 1e300;
  for (const auto& c : cases) {
    const auto rects = c.layered ? layered_domain() : unit_strip();
    auto mesh = std::make_shared<const PolyMesh>(generate_mesh(rects, c.n, 11 + c.n));
    auto space = std::make_shared<const FESpace>(mesh, c.p, c.p);
    AssemblyOptions o;
    o.materials = c.layered ? layered_materials() : ManufacturedCase::default_materials();
    o.bc = c.bc;
    o.delta = c.delta;
    const BlockSystem sys = Assembler(space, o).assemble();
    const Eigen::MatrixXd M(sys.M), Dm(sys.D), K(sys.K());
    auto asym = [](const Eigen::MatrixXd& X) {
      const double s = X.cwiseAbs().maxCoeff();
      return s > 0 ? (X - X.transpose()).cwiseAbs().maxCoeff() / s : 0.0;
    };
    worst_sym = std::max({worst_sym, asym(M), asym(Dm), asym(K)});
    const auto em = oracle::sym_eigs(M), ed = oracle::sym_eigs(Dm), ek = oracle::sym_eigs(K);
    min_m = std::min(min_m, em[0] / em.cwiseAbs().maxCoeff());
    const double nd = ed.cwiseAbs().maxCoeff();
    if (nd > 0) worst_d = std::min(worst_d, ed[0] / nd);
    worst_k = std::min(worst_k, ek[0] / ek.cwiseAbs().maxCoeff());
  }
  const bool ok = worst_sym <= 1e-12 && min_m > 0.0 && worst_d >= -1e-12 && worst_k >= -1e-10;
  return {ok, std::to_string(cases.size()) + " systems: asymmetry " + fmt(worst_sym, 3) +
                  " <= 1e-12; min lambda(M)/|M| " + fmt(min_m, 3) + " > 0; min lambda(D)/|D| " +
                  fmt(worst_d, 3) + " >= -1e-12; min lambda(K)/|K| " + fmt(worst_k, 3) + " >= -1e-10"};
}

// ---------------------------------------------------------------------------
// 5. Coupling symmetry on random vectors

Outcome coupling_symmetry() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  auto mesh = std::make_shared<const PolyMesh>(generate_mesh(unit_strip(), 40, 5));
  auto space = std::make_shared<const FESpace>(mesh, 2, 3);
  double worst = 0.0;
  long long nnz = 0;
  for (double delta : {0.0, 0.5, 1.0}) {
    AssemblyOptions o;
    o.materials = ManufacturedCase::default_materials();
    o.materials.poro.beta = 0.8;  // makes the delta dependence visible
    o.delta = delta;
    const SparseMatrix C = Assembler(space, o).coupling();
    nnz = std::max<long long>(nnz, C.nonZeros());
    const SparseMatrix Cabs = C.cwiseAbs();
    for (int k = 0; k < 10; ++k) {
      Eigen::VectorXd U(C.rows()), W(C.rows());
      for (Eigen::Index i = 0; i < U.size(); ++i) {
        U[i] = g(rng);
        W[i] = g(rng);
      }
      const double scale = U.cwiseAbs().dot(Cabs * W.cwiseAbs());
      worst = std::max(worst, std::abs(U.dot(C * W) - W.dot(C * U)) / scale);
    }
  }
  return {worst <= 1e-12 && nnz > 0,
          "max |U'CW - W'CU| / sum|U||C||W| = " + fmt(worst, 3) + " <= 1e-12 for delta 0, 0.5, 1"};
}

// ---------------------------------------------------------------------------
// 6. Energy stability of unforced runs

Outcome energy_stability() {
  struct Case {
    std::string name;
    bool layered;
    BoundaryConditions bc;
    double delta, dt, zeta, eta;
    int slabs;
  };
  const auto D = BoundaryKind::Dirichlet, A = BoundaryKind::Absorbing, F = BoundaryKind::Free;
  const std::vector<Case> cases = {
      {"undamped free", false, BoundaryConditions::all(F), 1.0, 0.02, 0.0, 0.0, 100},
      {"damped dirichlet", false, BoundaryConditions::all(D), 0.5, 0.02, 0.5, 0.5, 100},
      {"absorbing unit", false, {A, A, A, F}, 0.0, 0.02, 0.0, 0.0, 100},
      {"absorbing layered", true, {A, A, A, F}, 1.0, 0.01, 0.0, 0.0, 150},
      {"absorbing layered damped", true, {A, A, A, F}, 1.0, 0.01, 0.01, 0.0015, 150},
  };
  Outcome out{true, ""};
  for (const auto& c : cases) {
    const auto rects = c.layered ? layered_domain() : unit_strip();
    auto mesh = std::make_shared<const PolyMesh>(generate_mesh(rects, 80, 9));
    auto space = std::make_shared<const FESpace>(mesh, 2, 2);
    AssemblyOptions o;
    o.materials = c.layered ? layered_materials() : ManufacturedCase::default_materials();
    o.materials.elastic.zeta = c.layered ? 0.0 : c.zeta;
    o.materials.poro.zeta = c.zeta;
    o.materials.poro.eta = c.eta;
    o.bc = c.bc;
    o.delta = c.delta;
    const BlockSystem sys = Assembler(space, o).assemble();
    const SlabSolver solver(sys.M, sys.D, sys.K(), build_time_matrices(2, c.dt));
    // Smooth bump centred in the poroelastic part, spread over both regions.
    const BBox box = mesh->bounding_box();
    const Vec2 c0(box.lo.x() + 0.4 * (box.hi.x() - box.lo.x()), box.lo.y() + 0.55 * (box.hi.y() - box.lo.y()));
    const double w = 0.15 * (box.hi - box.lo).norm();
    auto bump = [&](double ax, double ay) {
      return [=](const Vec2& x) {
        const double e = std::exp(-(x - c0).squaredNorm() / (w * w));
        return Vec2(ax * e, ay * e);
      };
    };
    SlabState s0;
    s0.U = Eigen::VectorXd::Zero(space->ndof());
    s0.V = s0.U;
    for (Field f : kFields) {
      s0.U += space->project(bump(1.0, -0.5), f);
      s0.V += space->project(bump(0.3, 0.8), f);
    }
    const RunResult res = run_time_dg(solver, s0, c.slabs, {});
    double worst = -1e300;
    for (size_t k = 1; k < res.energy.size(); ++k)
      worst = std::max(worst, (res.energy[k].energy - res.energy[k - 1].energy) / res.energy[k - 1].energy);
    const bool ok = worst <= 1e-10;
    out.pass = out.pass && ok;
    out.detail += c.name + " max step change " + fmt(worst, 3) + " (E_T/E_0 " +
                  fmt(res.energy.back().energy / res.energy.front().energy, 3) + "); ";
  }
  out.detail += "tolerance 1e-10";
  return out;
}

// ---------------------------------------------------------------------------
// 7. Order of magnitude of the reference error

Outcome reference_error() {
  RunParams prm;
  prm.n_elements = 400;
  prm.p = 3;
  prm.r = 3;
  prm.dt = 0.01;
  prm.T = 1.0;
  const ErrorReport rep = solve_manufactured(ManufacturedCase(), prm);
  const double ref = 1.7814e-4;
  const double ratio = rep.l2 / ref;
  const bool ok = ratio <= 30.0 && ratio >= 1.0 / 30.0;
  return {ok, "L2 error " + fmt(rep.l2) + ", ratio to reference 1.7814e-4 is " + fmt(ratio, 3) +
                  " (allowed 1/30 to 30); energy error " + fmt(rep.energy, 3)};
}

// ---------------------------------------------------------------------------
// 8. Direct fast compressional arrival in the two-layer scenario

// Generalized 2x2 eigenvalue problem det(B - L A) = 0 solved by the quadratic formula.
double fast_speed_oracle(const PoroParams& p) {
  const double rho_p = p.phi * p.rho_f + (1 - p.phi) * p.rho_s, rho_w = p.a * p.rho_f / p.phi;
  const double a11 = rho_p, a12 = p.rho_f, a22 = rho_w;
  const double b11 = p.lambda + 2 * p.mu + p.m * p.beta * p.beta, b12 = p.m * p.beta, b22 = p.m;
  const double qa = a11 * a22 - a12 * a12;
  const double qb = -(a11 * b22 + a22 * b11 - 2 * a12 * b12);
  const double qc = b11 * b22 - b12 * b12;
  const double disc = std::sqrt(qb * qb - 4 * qa * qc);
  const double lmax = (-qb + disc) / (2 * qa);
  return std::sqrt(lmax);
}

// Envelope |x + i H x| via the discrete analytic signal.
std::vector<double> envelope(const std::vector<double>& x) {
  const size_t n = x.size();
  std::vector<std::complex<double>> X(n);
  for (size_t k = 0; k < n; ++k)
    for (size_t j = 0; j < n; ++j)
      X[k] += x[j] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * j % n) / double(n));
  std::vector<double> h(n, 0.0);
  h[0] = 1.0;
  for (size_t k = 1; k < (n + 1) / 2; ++k) h[k] = 2.0;
  if (n % 2 == 0) h[n / 2] = 1.0;
  std::vector<double> env(n);
  for (size_t j = 0; j < n; ++j) {
    std::complex<double> z = 0.0;
    for (size_t k = 0; k < n; ++k)
      z += h[k] * X[k] * std::polar(1.0, 2.0 * std::numbers::pi * double(k * j % n) / double(n));
    env[j] = std::abs(z) / double(n);
  }
  return env;
}

Outcome scenario_arrival() {
  SimulationConfig cfg = load_config(std::filesystem::path(XTPOLY_SOURCE_DIR) / "configs" / "two_layer_reduced.json");
  const double c_impl = poro_speeds(cfg.materials.poro).c_p1;
  const double c_ref = fast_speed_oracle(cfg.materials.poro);
  const double speed_err = std::abs(c_impl - c_ref) / c_ref;

  RunOptions opt;
  opt.write_outputs = false;
  const SimulationResult res = run_simulation(cfg, opt);
  const ReceiverSeries* rec = nullptr;
  for (const auto& s : res.receivers)
    if (s.name == "xr1") rec = &s;
  if (!rec) return {false, "receiver xr1 missing from the scenario config"};
  const PointSource& src = cfg.point_sources.at(0);
  const Vec2 d = rec->x - src.x;
  const Vec2 dir = d.normalized();
  // Radial solid velocity: columns 6, 7 are vx_p, vy_p.
  std::vector<double> vr(rec->rows.size());
  for (size_t i = 0; i < vr.size(); ++i) vr[i] = dir.x() * rec->rows[i][6] + dir.y() * rec->rows[i][7];
  const auto env = envelope(vr);
  size_t j = 0;
  for (size_t i = 1; i < env.size(); ++i)
    if (env[i] > env[j]) j = i;
  double tpk = rec->t[j];
  if (j > 0 && j + 1 < env.size()) {
    const double y0 = env[j - 1], y1 = env[j], y2 = env[j + 1];
    tpk += 0.5 * (y0 - y2) / (y0 - 2 * y1 + y2) * cfg.dt;
  }
  const double arrival = tpk - src.t0;
  const double expected = d.norm() / c_impl;
  const double rel = arrival / expected - 1.0;
  const bool ok = std::abs(rel) <= 0.10 && speed_err <= 1e-12;
  return {ok, "h=" + fmt(res.h, 3) + " p=" + std::to_string(cfg.p_p) + " r=" + std::to_string(cfg.r) +
                  ": arrival " + fmt(arrival) + " s vs distance/c_pI " + fmt(expected) + " s (" +
                  fmt(100 * rel, 3) + "%, allowed 10%); c_pI " + fmt(c_impl, 8) + " m/s, oracle deviation " +
                  fmt(speed_err, 3)};
}

// ---------------------------------------------------------------------------
// 9. Static patch test with linear fields

Outcome patch_test() {
  double worst = 0.0;
  int runs = 0;
  for (bool layered : {false, true})
    for (double delta : {0.0, 1.0})
      for (int p : {1, 2, 3}) {
        const Materials mat = layered ? layered_materials() : ManufacturedCase::default_materials();
        const auto& me = mat.elastic;
        const auto& mp = mat.poro;
        // Unit strip: poro on the left, interface x = 0, n_p = e_x.
        const double L = layered ? 1000.0 : 1.0;  // physical length scale
        const double a0 = 0.2, a1 = 0.7 / L, a2 = -0.4 / L, b0 = -0.1, b1 = 0.3 / L, b2 = 0.5 / L;
        const double c = 0.25 / L, d0 = 0.15, d1 = -0.35 / L, d2 = 0.45 / L;
        auto up = [=](const Vec2& x) { return Vec2(a0 + a1 * x.x() + a2 * x.y(), b0 + b1 * x.x() + b2 * x.y()); };
        // ((1 - delta) beta u_p + u_f) . e_x = 0 on x = 0
        auto uf = [=](const Vec2& x) {
          return Vec2(-(1 - delta) * mp.beta * (a0 + a2 * x.y()) + c * x.x(), d0 + d1 * x.x() + d2 * x.y());
        };
        const double pr = -mp.m * (mp.beta * (a1 + b2) + (c + d2));
        // u_e = u_p + x g: equal on x = 0, with g chosen to balance the traction.
        const Vec2 t_p((mp.lambda + 2 * mp.mu) * a1 + mp.lambda * b2 - delta * mp.beta * pr, mp.mu * (a2 + b1));
        const Vec2 t_e((me.lambda + 2 * me.mu) * a1 + me.lambda * b2, me.mu * (a2 + b1));
        const Vec2 gv((t_p.x() - t_e.x()) / (me.lambda + 2 * me.mu), (t_p.y() - t_e.y()) / me.mu);
        auto ue = [=](const Vec2& x) { return Vec2(up(x) + x.x() * gv); };

        std::vector<RegionRect> rects = {{-L, 0, 0, L, Region::Poroelastic}, {0, L, 0, L, Region::Elastic}};
        auto mesh = std::make_shared<const PolyMesh>(generate_mesh(rects, 30, 17 + p));
        auto space = std::make_shared<const FESpace>(mesh, p, p);
        AssemblyOptions o;
        o.materials = mat;
        o.delta = delta;
        const Assembler as(space, o);
        LoadData ld;
        ld.dir_e = [&](const Vec2& x, double) { return ue(x); };
        ld.dir_p = [&](const Vec2& x, double) { return up(x); };
        ld.dir_f = [&](const Vec2& x, double) { return uf(x); };
        // The zero-order damping term rho zeta^2 u is balanced by a body force.
        const double rho_p = mp.phi * mp.rho_f + (1 - mp.phi) * mp.rho_s;
        ld.f_e = [&](const Vec2& x, double) { return Vec2(me.rho * me.zeta * me.zeta * ue(x)); };
        ld.f_p = [&, rho_p](const Vec2& x, double) { return Vec2(rho_p * mp.zeta * mp.zeta * up(x)); };
        const LoadAssembler load(as, ld);
        Eigen::VectorXd U = space->project(ue, Field::Elastic) + space->project(up, Field::Solid) +
                            space->project(uf, Field::Fluid);
        const Eigen::VectorXd F = load(0.0);
        const double rr = relative_residual(as.stiffness() + as.coupling(), U, F);
        worst = std::max(worst, rr);
        ++runs;
      }
  return {worst <= 1e-10, std::to_string(runs) + " cases (delta 0 and 1, p 1-3, two material sets): max |KU - F| / |F| = " +
                              fmt(worst, 3) + " <= 1e-10"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"spatial convergence (energy norm, h sweep)", spatial_convergence},
      {"temporal convergence (L2 at T, dt sweep)", temporal_convergence},
      {"slab matrices equal Lobatto IIIC coefficients", tableau},
      {"operator structure (M SPD, D PSD, K symmetric and coercive)", operator_structure},
      {"interface coupling symmetry", coupling_symmetry},
      {"energy stability of unforced runs", energy_stability},
      {"reference error magnitude (p = r = 3, 400 elements, dt = 0.01)", reference_error},
      {"two-layer scenario fast P arrival", scenario_arrival},
      {"static patch test", patch_test},
  };
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) ids.push_back(i);

  int failed = 0;
  for (int id : ids) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::cout << "criterion " << id << " [FAIL] unknown criterion" << std::endl;
      ++failed;
      continue;
    }
    const auto& [name, fn] = criteria[id - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << id << " [" << (o.pass ? "PASS" : "FAIL") << "] " << name << ": " << o.detail
              << " (" << fmt(s, 3) << " s)" << std::endl;
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

#include "xtpoly/timedg.hpp"

#include "xtpoly/error.hpp"
#include "xtpoly/quadrature.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace xtpoly {

namespace {

Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != j) b[j] /= (x[j] - x[k]);
  return b;
}

// D(i, j) = psi_j'(x_i)
Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  const Eigen::VectorXd b = barycentric_weights(x);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) D(i, j) = (b[j] / b[i]) / (x[i] - x[j]);
    D(i, i) = -D.row(i).sum();
  }
  return D;
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

Eigen::VectorXd TimeMatrices::basis(double s) const {
  const Eigen::Index n = nodes.size();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != l) v[l] *= (s - nodes[k]) / (nodes[l] - nodes[k]);
  return v;
}

TimeMatrices build_time_matrices(int r, double dt) {
  if (r < 1) throw ParameterError("time degree r must be >= 1, got " + std::to_string(r));
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ParameterError("time step must be positive, got " + std::to_string(dt));
  TimeMatrices tm;
  tm.r = r;
  tm.dt = dt;
  const int S = r + 1;
  const auto gll = quad::gauss_lobatto(S);
  tm.nodes.resize(S);
  tm.weights.resize(S);
  for (int i = 0; i < S; ++i) {
    tm.nodes[i] = 0.5 * dt * (gll.x[i] + 1.0);
    tm.weights[i] = 0.5 * dt * gll.w[i];
  }
  tm.nodes[0] = 0.0;
  tm.nodes[S - 1] = dt;

  // Lobatto quadrature of psi_m' psi_l collapses to w_l psi_m'(x_l).
  const Eigen::MatrixXd Dm = differentiation_matrix(tm.nodes);
  tm.N1 = tm.weights.asDiagonal() * Dm;
  tm.N2 = tm.weights.asDiagonal();
  tm.N3 = Eigen::MatrixXd::Zero(S, S);
  tm.N3(0, 0) = 1.0;
  tm.N4 = (tm.N1 + tm.N3).inverse();
  tm.N5 = tm.N4 * tm.N2;
  tm.N6 = tm.N2 * tm.N4;
  tm.N7 = tm.N2 * tm.N4 * tm.N2;
  return tm;
}

SlabSolver::SlabSolver(SparseMatrix M, SparseMatrix D, SparseMatrix K, TimeMatrices tm)
    : M_(std::move(M)), D_(std::move(D)), K_(std::move(K)), tm_(std::move(tm)) {
  const auto n = M_.rows();
  if (M_.cols() != n || D_.rows() != n || D_.cols() != n || K_.rows() != n || K_.cols() != n)
    throw SolverError("slab solver: M, D and K must be square of equal size");
  M_.makeCompressed();
  D_.makeCompressed();
  K_.makeCompressed();
  const Eigen::MatrixXd N13 = tm_.N1 + tm_.N3;
  Mw_ = kron_assemble({{&N13, &M_}, {&tm_.N2, &D_}, {&tm_.N7, &K_}});
  try {
    lu_ = std::make_unique<SparseLU>(Mw_);
  } catch (const SolverError& e) {
    throw SolverError(std::string("slab matrix factorization: ") + e.what());
  }
}

SlabState SlabSolver::advance(const SlabState& s, const LoadFn& load, int slab,
                              SlabNodes* nodes) const {
  const int n = size();
  const int S = tm_.stages();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) * S);
  if (load)
    for (int l = 0; l < S; ++l)
      load(s.t + tm_.nodes[l], tm_.weights[l], rhs.segment(static_cast<Eigen::Index>(l) * n, n));
  rhs.head(n) += M_ * s.V;
  const Eigen::VectorXd KU = K_ * s.U;
  for (int l = 0; l < S; ++l) rhs.segment(static_cast<Eigen::Index>(l) * n, n) -= tm_.N6(l, 0) * KU;

  Eigen::VectorXd aw;
  try {
    aw = lu_->solve(rhs);
  } catch (const SolverError& e) {
    throw SolverError("slab " + std::to_string(slab) + ": " + e.what());
  }

  auto u_at = [&](int l) {
    Eigen::VectorXd u = tm_.N4(l, 0) * s.U;
    for (int m = 0; m < S; ++m) u += tm_.N5(l, m) * aw.segment(static_cast<Eigen::Index>(m) * n, n);
    return u;
  };

  SlabState out;
  out.t = s.t + tm_.dt;
  if (nodes) {
    nodes->t0 = s.t;
    nodes->U.resize(n, S);
    nodes->V.resize(n, S);
    for (int l = 0; l < S; ++l) {
      nodes->U.col(l) = u_at(l);
      nodes->V.col(l) = aw.segment(static_cast<Eigen::Index>(l) * n, n);
    }
    out.U = nodes->U.col(S - 1);
    out.V = nodes->V.col(S - 1);
  } else {
    out.U = u_at(S - 1);
    out.V = aw.segment(static_cast<Eigen::Index>(S - 1) * n, n);
  }
  return out;
}

double discrete_energy(const SlabSolver& solver, const SlabState& s) {
  return s.V.dot(solver.M() * s.V) + s.U.dot(solver.K() * s.U);
}

RunResult run_time_dg(const SlabSolver& solver, SlabState initial, int num_slabs,
                      const LoadFn& load, const SlabObserver& observer, bool track_energy) {
  const auto start = std::chrono::steady_clock::now();
  if (initial.U.size() != solver.size() || initial.V.size() != solver.size())
    throw SolverError("initial state size does not match the system size");
  if (!finite(initial.U) || !finite(initial.V))
    throw InstabilityError("non-finite initial state", 0);
  RunResult res;
  const bool has_damping = solver.D().nonZeros() > 0;
  if (track_energy) res.energy.push_back({initial.t, discrete_energy(solver, initial), 0.0});

  const auto& tm = solver.time();
  SlabState s = std::move(initial);
  SlabNodes nodes;
  const bool want_nodes = static_cast<bool>(observer) || (track_energy && has_damping);
  const double t_start = s.t;
  for (int k = 1; k <= num_slabs; ++k) {
    // Slab starts are t_start + (k - 1) dt, so long runs do not accumulate drift.
    s.t = t_start + (k - 1) * tm.dt;
    s = solver.advance(s, load, k, want_nodes ? &nodes : nullptr);
    s.t = t_start + k * tm.dt;
    if (!finite(s.U) || !finite(s.V)) throw InstabilityError("non-finite state", k);
    if (track_energy) {
      double diss = res.energy.back().dissipated;
      if (has_damping)
        for (int l = 0; l < tm.stages(); ++l) {
          const Eigen::VectorXd v = nodes.V.col(l);
          diss += 2.0 * tm.weights[l] * v.dot(solver.D() * v);
        }
      res.energy.push_back({s.t, discrete_energy(solver, s), diss});
      if (!std::isfinite(res.energy.back().energy))
        throw InstabilityError("non-finite energy", k);
    }
    if (observer) observer(k, s, nodes);
  }
  res.final = std::move(s);
  res.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace xtpoly

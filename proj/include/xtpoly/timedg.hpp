#pragma once

#include "xtpoly/linalg.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace xtpoly {

/// Lagrange basis on the r+1 Gauss-Lobatto nodes of one slab and the slab matrices
/// N1..N7, all integrated with the same Lobatto rule.
struct TimeMatrices {
  int r = 1;
  double dt = 0.0;
  Eigen::VectorXd nodes;    // offsets from the slab start, nodes[0] = 0, nodes[r] = dt
  Eigen::VectorXd weights;  // Lobatto weights, summing to dt
  Eigen::MatrixXd N1;       // (psi_m', psi_l)
  Eigen::MatrixXd N2;       // (psi_m, psi_l), diagonal
  Eigen::MatrixXd N3;       // psi_m(t+) psi_l(t+)
  Eigen::MatrixXd N4;       // (N1 + N3)^-1
  Eigen::MatrixXd N5;       // N4 N2
  Eigen::MatrixXd N6;       // N2 N4
  Eigen::MatrixXd N7;       // N2 N4 N2

  int stages() const { return r + 1; }
  /// Values of the r+1 Lagrange polynomials at offset s in [0, dt].
  Eigen::VectorXd basis(double s) const;
};

/// Throws ParameterError for r < 1 or dt <= 0.
TimeMatrices build_time_matrices(int r, double dt);

/// End-of-slab traces U(t_n^-), V(t_n^-).
struct SlabState {
  double t = 0.0;
  Eigen::VectorXd U, V;
};

/// Nodal coefficients of one slab solution, one column per Lobatto node.
struct SlabNodes {
  double t0 = 0.0;
  Eigen::MatrixXd U, V;
};

/// out += scale * F(t). An empty function means F = 0.
using LoadFn = std::function<void(double t, double scale, Eigen::Ref<Eigen::VectorXd> out)>;

/// Solves M U'' + D U' + K U = F slab by slab. The slab matrix
/// M_w = (N1 + N3) (x) M + N2 (x) D + N7 (x) K is factorized once.
class SlabSolver {
 public:
  SlabSolver(SparseMatrix M, SparseMatrix D, SparseMatrix K, TimeMatrices tm);

  const TimeMatrices& time() const { return tm_; }
  int size() const { return static_cast<int>(M_.rows()); }
  const SparseMatrix& M() const { return M_; }
  const SparseMatrix& D() const { return D_; }
  const SparseMatrix& K() const { return K_; }
  const SparseMatrix& slab_matrix() const { return Mw_; }
  const SparseLU& factorization() const { return *lu_; }

  /// One slab starting from `s` at time s.t. Solver failures carry the slab index.
  SlabState advance(const SlabState& s, const LoadFn& load, int slab,
                    SlabNodes* nodes = nullptr) const;

 private:
  SparseMatrix M_, D_, K_, Mw_;
  TimeMatrices tm_;
  std::unique_ptr<SparseLU> lu_;
};

/// Energy at a slab end: V'MV + U'KU, and the accumulated damping 2 sum w V'DV.
struct EnergySample {
  double t = 0.0;
  double energy = 0.0;
  double dissipated = 0.0;
  double total() const { return energy + dissipated; }
};

double discrete_energy(const SlabSolver& solver, const SlabState& s);

/// Called after every slab with its index (1-based), end traces and nodal values.
using SlabObserver = std::function<void(int slab, const SlabState& end, const SlabNodes& nodes)>;

struct RunResult {
  SlabState final;
  std::vector<EnergySample> energy;  // entry 0 is the initial state
  double wall_s = 0.0;
};

/// Advances num_slabs slabs. Throws InstabilityError on a non-finite state.
RunResult run_time_dg(const SlabSolver& solver, SlabState initial, int num_slabs,
                      const LoadFn& load, const SlabObserver& observer = {},
                      bool track_energy = true);

}  // namespace xtpoly

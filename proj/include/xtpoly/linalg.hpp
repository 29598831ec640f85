#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <filesystem>
#include <memory>
#include <vector>

namespace xtpoly {

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// One term T (x) S of a Kronecker sum: a small dense matrix times a sparse block.
struct KronTerm {
  const Eigen::MatrixXd* time;
  const SparseMatrix* space;
};

/// Explicit sum of Kronecker products, block (i, j) = sum_k T_k(i, j) S_k.
///
/// Every block carries the union sparsity pattern of the space matrices, so the
/// pattern depends only on the inputs' patterns and the time-block size.
SparseMatrix kron_assemble(const std::vector<KronTerm>& terms);

/// (T (x) I) x for a vector laid out as time-major blocks of size n.
Eigen::VectorXd kron_identity_apply(const Eigen::MatrixXd& T, const Eigen::VectorXd& x, int n);

/// (T (x) S) x for a vector laid out as time-major blocks.
Eigen::VectorXd kron_apply(const Eigen::MatrixXd& T, const SparseMatrix& S,
                           const Eigen::VectorXd& x);

/// Sparse LU factorization (UMFPACK) kept alive for repeated solves.
class SparseLU {
 public:
  explicit SparseLU(const SparseMatrix& A);
  ~SparseLU();
  SparseLU(const SparseLU&) = delete;
  SparseLU& operator=(const SparseLU&) = delete;

  int rows() const { return n_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::VectorXd solve_transpose(const Eigen::VectorXd& b) const;
  /// Entries in the L and U factors.
  long long factor_nnz() const { return factor_nnz_; }
  /// Reciprocal condition estimate reported by the factorization.
  double rcond() const { return rcond_; }

 private:
  Eigen::VectorXd apply(int sys, const Eigen::VectorXd& b) const;

  int n_ = 0;
  std::vector<int> ptr_, idx_;
  std::vector<double> val_;
  void* numeric_ = nullptr;
  long long factor_nnz_ = 0;
  double rcond_ = 0.0;
};

double norm1(const SparseMatrix& A);

/// Hager-Higham estimate of the 1-norm condition number using an existing factorization.
double estimate_condition(const SparseMatrix& A, const SparseLU& lu);
double estimate_condition(const SparseMatrix& A);

/// Relative residual |Ax - b| / |b| (|b| = 0 gives |Ax|).
double relative_residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& A);

}  // namespace xtpoly

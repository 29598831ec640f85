#include "xtpoly/linalg.hpp"

#include "xtpoly/error.hpp"

#include <umfpack.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace xtpoly {

SparseMatrix kron_assemble(const std::vector<KronTerm>& terms) {
  if (terms.empty()) throw SolverError("kron_assemble: no terms");
  const Eigen::Index nt = terms[0].time->rows();
  const Eigen::Index n = terms[0].space->rows();
  for (const auto& t : terms) {
    if (t.time->rows() != nt || t.time->cols() != nt)
      throw SolverError("kron_assemble: time matrices must be square and of equal order");
    if (t.space->rows() != n || t.space->cols() != n)
      throw SolverError("kron_assemble: space blocks must be square and of equal order");
  }
  const int nk = static_cast<int>(terms.size());

  // Union pattern per spatial row, with one value slot per term.
  std::vector<int> uptr(n + 1, 0);
  std::vector<int> ucol;
  std::vector<double> uval;  // nk values per union entry
  std::vector<int> cols;
  for (Eigen::Index row = 0; row < n; ++row) {
    cols.clear();
    for (int k = 0; k < nk; ++k)
      for (SparseMatrix::InnerIterator it(*terms[k].space, row); it; ++it)
        cols.push_back(static_cast<int>(it.col()));
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    const std::size_t base = ucol.size();
    ucol.insert(ucol.end(), cols.begin(), cols.end());
    uval.resize(ucol.size() * nk, 0.0);
    for (int k = 0; k < nk; ++k)
      for (SparseMatrix::InnerIterator it(*terms[k].space, row); it; ++it) {
        const auto pos = std::lower_bound(ucol.begin() + base, ucol.end(), it.col()) - ucol.begin();
        uval[pos * nk + k] += it.value();
      }
    uptr[row + 1] = static_cast<int>(ucol.size());
  }

  const long long unnz = static_cast<long long>(ucol.size());
  const long long total = unnz * nt * nt;
  if (total > std::numeric_limits<int>::max())
    throw SolverError("kron_assemble: result exceeds 32-bit index range");
  SparseMatrix out(nt * n, nt * n);
  out.resizeNonZeros(static_cast<Eigen::Index>(total));
  int* optr = out.outerIndexPtr();
  int* oidx = out.innerIndexPtr();
  double* oval = out.valuePtr();
  long long pos = 0;
  optr[0] = 0;
  for (Eigen::Index i = 0; i < nt; ++i)
    for (Eigen::Index row = 0; row < n; ++row) {
      for (Eigen::Index j = 0; j < nt; ++j) {
        double coef[16];
        std::vector<double> coef_dyn;
        double* cf = coef;
        if (nk > 16) {
          coef_dyn.resize(nk);
          cf = coef_dyn.data();
        }
        for (int k = 0; k < nk; ++k) cf[k] = (*terms[k].time)(i, j);
        for (int e = uptr[row]; e < uptr[row + 1]; ++e) {
          double v = 0.0;
          for (int k = 0; k < nk; ++k) v += cf[k] * uval[static_cast<std::size_t>(e) * nk + k];
          oidx[pos] = static_cast<int>(j * n + ucol[e]);
          oval[pos] = v;
          ++pos;
        }
      }
      optr[i * n + row + 1] = static_cast<int>(pos);
    }
  out.finalize();
  return out;
}

Eigen::VectorXd kron_identity_apply(const Eigen::MatrixXd& T, const Eigen::VectorXd& x, int n) {
  const Eigen::Index nt = T.rows();
  if (T.cols() * n != x.size()) throw SolverError("kron_identity_apply: dimension mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(nt * n);
  for (Eigen::Index i = 0; i < nt; ++i)
    for (Eigen::Index j = 0; j < T.cols(); ++j)
      if (T(i, j) != 0.0) y.segment(i * n, n) += T(i, j) * x.segment(j * n, n);
  return y;
}

Eigen::VectorXd kron_apply(const Eigen::MatrixXd& T, const SparseMatrix& S,
                           const Eigen::VectorXd& x) {
  const Eigen::Index n = S.rows();
  if (T.cols() * S.cols() != x.size()) throw SolverError("kron_apply: dimension mismatch");
  Eigen::VectorXd Sx(T.cols() * n);
  for (Eigen::Index j = 0; j < T.cols(); ++j) Sx.segment(j * n, n) = S * x.segment(j * S.cols(), S.cols());
  return kron_identity_apply(T, Sx, static_cast<int>(n));
}

// ---------------------------------------------------------------------------

SparseLU::SparseLU(const SparseMatrix& A) : n_(static_cast<int>(A.rows())) {
  if (A.rows() != A.cols()) throw SolverError("LU: matrix is not square");
  SparseMatrix C = A;
  C.makeCompressed();
  ptr_.assign(C.outerIndexPtr(), C.outerIndexPtr() + n_ + 1);
  idx_.assign(C.innerIndexPtr(), C.innerIndexPtr() + C.nonZeros());
  val_.assign(C.valuePtr(), C.valuePtr() + C.nonZeros());

  double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
  umfpack_di_defaults(control);
  void* symbolic = nullptr;
  // The CSR arrays of A are the CSC arrays of A^T.
  int status = umfpack_di_symbolic(n_, n_, ptr_.data(), idx_.data(), val_.data(), &symbolic,
                                   control, info);
  if (status != UMFPACK_OK)
    throw SolverError("LU: symbolic analysis failed (status " + std::to_string(status) + ")");
  status = umfpack_di_numeric(ptr_.data(), idx_.data(), val_.data(), symbolic, &numeric_, control,
                              info);
  umfpack_di_free_symbolic(&symbolic);
  if (status == UMFPACK_ERROR_out_of_memory) {
    if (numeric_) umfpack_di_free_numeric(&numeric_);
    char buf[128];
    std::snprintf(buf, sizeof buf, "LU: out of memory (estimated %.0f MB for the factors)",
                  info[UMFPACK_NUMERIC_SIZE_ESTIMATE] * info[UMFPACK_SIZE_OF_UNIT] / 1e6);
    throw SolverError(buf);
  }
  if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix) {
    if (numeric_) umfpack_di_free_numeric(&numeric_);
    throw SolverError("LU: numeric factorization failed (status " + std::to_string(status) + ")");
  }
  if (status == UMFPACK_WARNING_singular_matrix) {
    std::string detail;
    if (numeric_) {
      std::vector<double> d(n_);
      if (umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                                 nullptr, d.data(), nullptr, nullptr, numeric_) == UMFPACK_OK) {
        int k = 0;
        for (int i = 1; i < n_; ++i)
          if (std::abs(d[i]) < std::abs(d[k])) k = i;
        char buf[96];
        std::snprintf(buf, sizeof buf, ": pivot %d has magnitude %.3e", k, std::abs(d[k]));
        detail = buf;
      }
      umfpack_di_free_numeric(&numeric_);
    }
    throw SolverError("LU: matrix is singular to working precision" + detail);
  }
  factor_nnz_ = static_cast<long long>(info[UMFPACK_LNZ] + info[UMFPACK_UNZ]);
  rcond_ = info[UMFPACK_RCOND];
}

SparseLU::~SparseLU() {
  if (numeric_) umfpack_di_free_numeric(&numeric_);
}

Eigen::VectorXd SparseLU::apply(int sys, const Eigen::VectorXd& b) const {
  if (b.size() != n_) throw SolverError("LU: right-hand side has wrong size");
  Eigen::VectorXd x(n_);
  double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
  umfpack_di_defaults(control);
  control[UMFPACK_IRSTEP] = 0;
  const int status = umfpack_di_solve(sys, ptr_.data(), idx_.data(), val_.data(), x.data(),
                                      b.data(), numeric_, control, info);
  if (status != UMFPACK_OK)
    throw SolverError("LU: solve failed (status " + std::to_string(status) + ")");
  return x;
}

Eigen::VectorXd SparseLU::solve(const Eigen::VectorXd& b) const { return apply(UMFPACK_At, b); }

Eigen::VectorXd SparseLU::solve_transpose(const Eigen::VectorXd& b) const {
  return apply(UMFPACK_A, b);
}

double norm1(const SparseMatrix& A) {
  Eigen::VectorXd col = Eigen::VectorXd::Zero(A.cols());
  for (Eigen::Index r = 0; r < A.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) col[it.col()] += std::abs(it.value());
  return A.cols() ? col.maxCoeff() : 0.0;
}

double estimate_condition(const SparseMatrix& A, const SparseLU& lu) {
  const int n = lu.rows();
  if (n == 0) return 0.0;
  // Hager's method for |A^{-1}|_1 with Higham's extra test vector.
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  double est = 0.0;
  int last_j = -1;
  for (int it = 0; it < 5; ++it) {
    const Eigen::VectorXd y = lu.solve(x);
    const double ny = y.lpNorm<1>();
    if (it > 0 && ny <= est) {
      est = std::max(est, ny);
      break;
    }
    est = ny;
    Eigen::VectorXd xi(n);
    for (int i = 0; i < n; ++i) xi[i] = y[i] >= 0.0 ? 1.0 : -1.0;
    const Eigen::VectorXd z = lu.solve_transpose(xi);
    Eigen::Index j;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x) || static_cast<int>(j) == last_j) break;
    last_j = static_cast<int>(j);
    x.setZero();
    x[j] = 1.0;
  }
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i)
    b[i] = (i % 2 ? -1.0 : 1.0) * (1.0 + (n > 1 ? static_cast<double>(i) / (n - 1) : 0.0));
  const double alt = 2.0 * lu.solve(b).lpNorm<1>() / (3.0 * n);
  est = std::max(est, alt);
  return norm1(A) * est;
}

double estimate_condition(const SparseMatrix& A) {
  const SparseLU lu(A);
  return estimate_condition(A, lu);
}

double relative_residual(const SparseMatrix& A, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b) {
  const double nb = b.norm();
  const double r = (A * x - b).norm();
  return nb > 0.0 ? r / nb : r;
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& A) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  char buf[64];
  for (Eigen::Index r = 0; r < A.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
    }
}

}  // namespace xtpoly

#include "xtpoly/error.hpp"
#include "xtpoly/linalg.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace xtpoly;

namespace {

SparseMatrix random_sparse(int n, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i == j || coin(rng) < density) t.emplace_back(i, j, u(rng));
  SparseMatrix S(n, n);
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

Eigen::MatrixXd dense_kron(const Eigen::MatrixXd& T, const Eigen::MatrixXd& S) {
  Eigen::MatrixXd K(T.rows() * S.rows(), T.cols() * S.cols());
  for (Eigen::Index i = 0; i < T.rows(); ++i)
    for (Eigen::Index j = 0; j < T.cols(); ++j)
      K.block(i * S.rows(), j * S.cols(), S.rows(), S.cols()) = T(i, j) * S;
  return K;
}

SparseMatrix to_sparse(const Eigen::MatrixXd& A) { return A.sparseView(); }

}  // namespace

TEST(Kron, ScalarBlocks) {
  Eigen::MatrixXd N13(1, 1), N2(1, 1), N7(1, 1);
  N13 << 2.0;
  N2 << 0.5;
  N7 << 0.25;
  SparseMatrix I(1, 1);
  I.insert(0, 0) = 1.0;
  I.makeCompressed();
  const auto Mw = kron_assemble({{&N13, &I}, {&N2, &I}, {&N7, &I}});
  ASSERT_EQ(Mw.rows(), 1);
  EXPECT_DOUBLE_EQ(Mw.coeff(0, 0), 2.75);
}

TEST(Kron, MatchesDenseOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto M = random_sparse(10, 0.2, rng);
  const auto D = random_sparse(10, 0.1, rng);
  const auto K = random_sparse(10, 0.3, rng);
  Eigen::MatrixXd T1(2, 2), T2(2, 2), T3(2, 2);
  for (auto* T : {&T1, &T2, &T3})
    for (int i = 0; i < 4; ++i) (*T)(i / 2, i % 2) = u(rng);
  const auto Mw = kron_assemble({{&T1, &M}, {&T2, &D}, {&T3, &K}});
  const Eigen::MatrixXd ref = dense_kron(T1, Eigen::MatrixXd(M)) +
                              dense_kron(T2, Eigen::MatrixXd(D)) +
                              dense_kron(T3, Eigen::MatrixXd(K));
  EXPECT_LE((Eigen::MatrixXd(Mw) - ref).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LE(Mw.nonZeros(), 4 * (M.nonZeros() + D.nonZeros() + K.nonZeros()));
  // Indices strictly increasing per row.
  for (Eigen::Index r = 0; r < Mw.outerSize(); ++r) {
    int prev = -1;
    for (SparseMatrix::InnerIterator it(Mw, r); it; ++it) {
      EXPECT_GT(it.col(), prev);
      prev = static_cast<int>(it.col());
    }
  }
}

TEST(Kron, PatternIndependentOfValues) {
  std::mt19937_64 rng(5);
  auto M = random_sparse(8, 0.3, rng);
  Eigen::MatrixXd T = Eigen::MatrixXd::Random(3, 3);
  const auto a = kron_assemble({{&T, &M}});
  T.setZero();
  const auto b = kron_assemble({{&T, &M}});
  ASSERT_EQ(a.nonZeros(), b.nonZeros());
  for (Eigen::Index i = 0; i < a.nonZeros(); ++i)
    EXPECT_EQ(a.innerIndexPtr()[i], b.innerIndexPtr()[i]);
}

TEST(Kron, DimensionMismatch) {
  Eigen::MatrixXd T2 = Eigen::MatrixXd::Identity(2, 2), T3 = Eigen::MatrixXd::Identity(3, 3);
  SparseMatrix A(4, 4), B(5, 5);
  EXPECT_THROW(kron_assemble({{&T2, &A}, {&T3, &A}}), SolverError);
  EXPECT_THROW(kron_assemble({{&T2, &A}, {&T2, &B}}), SolverError);
  EXPECT_THROW(kron_assemble({}), SolverError);
}

TEST(Kron, MixedProductIdentity) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd P = Eigen::MatrixXd::Random(3, 3);
    const auto Q = random_sparse(7, 0.4, rng);
    const Eigen::VectorXd u = Eigen::VectorXd::Random(3), v = Eigen::VectorXd::Random(7);
    Eigen::VectorXd uv(21);
    for (int i = 0; i < 3; ++i) uv.segment(i * 7, 7) = u[i] * v;
    const Eigen::VectorXd lhs = kron_apply(P, Q, uv);
    const Eigen::VectorXd Pu = P * u, Qv = Q * v;
    Eigen::VectorXd rhs(21);
    for (int i = 0; i < 3; ++i) rhs.segment(i * 7, 7) = Pu[i] * Qv;
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-13);
    const auto S = kron_assemble({{&P, &Q}});
    EXPECT_LE((S * uv - rhs).cwiseAbs().maxCoeff(), 1e-13);
    const Eigen::VectorXd Iv = kron_identity_apply(P, uv, 7);
    for (int i = 0; i < 3; ++i)
      EXPECT_LE((Iv.segment(i * 7, 7) - Pu[i] * v).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Solve, Identity) {
  const SparseMatrix I = to_sparse(Eigen::MatrixXd::Identity(5, 5));
  const SparseLU lu(I);
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, 1, 5);
  EXPECT_EQ(lu.solve(b), b);
}

TEST(Solve, TwoByTwo) {
  Eigen::MatrixXd A(2, 2);
  A << 2, 1, 1, 2;
  const SparseLU lu(to_sparse(A));
  const auto x = lu.solve(Eigen::Vector2d(3, 3));
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
}

TEST(Solve, RandomSpdAgainstDense) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Eigen::MatrixXd B(50, 50);
  for (int i = 0; i < 50 * 50; ++i) B.data()[i] = g(rng);
  const Eigen::MatrixXd A = B * B.transpose() + 50 * Eigen::MatrixXd::Identity(50, 50);
  Eigen::VectorXd b(50);
  for (int i = 0; i < 50; ++i) b[i] = g(rng);
  const auto S = to_sparse(A);
  const SparseLU lu(S);
  const auto x = lu.solve(b);
  EXPECT_LE(relative_residual(S, x, b), 1e-10);
  const Eigen::VectorXd ref = A.llt().solve(b);
  EXPECT_LE((x - ref).norm() / ref.norm(), 1e-12);
}

TEST(Solve, NonsymmetricAndTranspose) {
  std::mt19937_64 rng(12);
  auto S = random_sparse(40, 0.1, rng);
  S += to_sparse(10 * Eigen::MatrixXd::Identity(40, 40));
  const Eigen::MatrixXd A(S);
  const Eigen::VectorXd b = Eigen::VectorXd::Random(40);
  const SparseLU lu(S);
  EXPECT_LE((lu.solve(b) - A.partialPivLu().solve(b)).norm(), 1e-12);
  EXPECT_LE((lu.solve_transpose(b) - A.transpose().partialPivLu().solve(b)).norm(), 1e-12);
  EXPECT_GT(lu.factor_nnz(), 0);
}

TEST(Solve, CachedFactorizationMatchesFresh) {
  std::mt19937_64 rng(13);
  auto S = random_sparse(60, 0.08, rng);
  S += to_sparse(8 * Eigen::MatrixXd::Identity(60, 60));
  const SparseLU cached(S);
  for (int k = 0; k < 4; ++k) {
    const Eigen::VectorXd b = Eigen::VectorXd::Random(60);
    const SparseLU fresh(S);
    EXPECT_LE((cached.solve(b) - fresh.solve(b)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Solve, SingularReportsPivot) {
  Eigen::MatrixXd A(3, 3);
  A << 1, 2, 3, 2, 4, 6, 0, 1, 1;
  try {
    const SparseLU lu(to_sparse(A));
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_NE(std::string(e.what()).find("singular"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("pivot"), std::string::npos);
  }
  SparseMatrix Z(2, 2);
  EXPECT_THROW(SparseLU{Z}, SolverError);
  EXPECT_THROW(SparseLU(SparseMatrix(2, 3)), SolverError);
}

TEST(Condition, IdentityAndDiagonal) {
  EXPECT_NEAR(estimate_condition(to_sparse(Eigen::MatrixXd::Identity(7, 7))), 1.0, 1e-14);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = 1e6;
  EXPECT_NEAR(estimate_condition(to_sparse(D)), 1e6, 1e-6);
}

TEST(Condition, WithinFactorTenOfDense) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd A(30, 30);
    for (int i = 0; i < 900; ++i) A.data()[i] = g(rng);
    const double exact = A.cwiseAbs().colwise().sum().maxCoeff() *
                         A.inverse().cwiseAbs().colwise().sum().maxCoeff();
    const double est = estimate_condition(to_sparse(A));
    EXPECT_LE(est, exact * (1 + 1e-10));
    EXPECT_GE(est, exact / 10.0);
  }
}

TEST(MatrixMarket, RoundTripHeaderAndEntries) {
  Eigen::MatrixXd A(2, 3);
  A << 1, 0, 2.5, 0, -3, 0;
  const auto path = std::filesystem::temp_directory_path() / "xtpoly_mm_test.mtx";
  write_matrix_market(path, to_sparse(A));
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "%%MatrixMarket matrix coordinate real general");
  int r, c, nnz;
  in >> r >> c >> nnz;
  EXPECT_EQ(r, 2);
  EXPECT_EQ(c, 3);
  EXPECT_EQ(nnz, 3);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2, 3);
  for (int k = 0; k < nnz; ++k) {
    int i, j;
    double v;
    in >> i >> j >> v;
    B(i - 1, j - 1) = v;
  }
  EXPECT_EQ(A, B);
  std::filesystem::remove(path);
}

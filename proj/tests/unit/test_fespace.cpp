#include "oracles.hpp"
#include "xtpoly/error.hpp"
#include "xtpoly/fespace.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace xtpoly;

namespace {

std::shared_ptr<const PolyMesh> strip(int n, std::uint64_t seed = 7) {
  std::vector<RegionRect> r = {{-1, 0, 0, 1, Region::Poroelastic}, {0, 1, 0, 1, Region::Elastic}};
  return std::make_shared<const PolyMesh>(generate_mesh(r, n, seed));
}

std::shared_ptr<const PolyMesh> unit_square(int n, std::uint64_t seed = 1) {
  std::vector<RegionRect> r = {{0, 1, 0, 1, Region::Elastic}};
  return std::make_shared<const PolyMesh>(generate_mesh(r, n, seed));
}

}  // namespace

TEST(DofMap, Dimensions) {
  const FESpace one(unit_square(1), 2, 2);
  EXPECT_EQ(one.nb(0), 6);
  EXPECT_EQ(one.ndof(), 12);

  const FESpace s(strip(100), 3, 3);
  EXPECT_EQ(s.ndof(), 3000);
  EXPECT_EQ(s.field_size(Field::Elastic), 1000);
  EXPECT_EQ(s.field_size(Field::Solid), 1000);
  EXPECT_EQ(s.field_size(Field::Fluid), 1000);
  EXPECT_EQ(s.field_offset(Field::Elastic), 0);
  EXPECT_EQ(s.field_offset(Field::Solid), 1000);
  EXPECT_EQ(s.field_offset(Field::Fluid), 2000);

  const FESpace mixed(strip(100), 2, 4);
  for (int e = 0; e < mixed.mesh().num_elements(); ++e) {
    if (mixed.mesh().element(e).region == Region::Elastic) {
      EXPECT_EQ(2 * mixed.nb(e), 12);
      EXPECT_EQ(mixed.offset(e, Field::Solid), -1);
    } else {
      EXPECT_EQ(2 * mixed.nb(e), 30);
      EXPECT_EQ(mixed.offset(e, Field::Elastic), -1);
    }
  }
  EXPECT_EQ(mixed.ndof(), 50 * 12 + 2 * 50 * 30);
}

TEST(DofMap, OffsetsPartitionTheRange) {
  const FESpace s(strip(40), 2, 3);
  std::vector<int> hit(s.ndof(), 0);
  for (int e = 0; e < s.mesh().num_elements(); ++e)
    for (Field f : s.fields(e))
      for (int i = 0; i < 2 * s.nb(e); ++i) ++hit[s.offset(e, f) + i];
  for (int h : hit) EXPECT_EQ(h, 1);
  for (Field f : kFields) {
    int prev = -1;
    for (int e = 0; e < s.mesh().num_elements(); ++e)
      if (s.offset(e, f) >= 0) {
        EXPECT_GT(s.offset(e, f), prev);
        prev = s.offset(e, f);
      }
  }
}

TEST(DofMap, DegreeZeroRejected) {
  EXPECT_THROW(FESpace(unit_square(1), 0, 1), ParameterError);
  EXPECT_THROW(FESpace(unit_square(1), 1, 0), ParameterError);
}

TEST(Basis, ConstantFunction) {
  const BBox box{{-0.3, 0.2}, {0.9, 0.7}};
  const ScaledLegendre b(box, 3);
  Eigen::VectorXd v(b.size()), gx(b.size()), gy(b.size());
  for (const Vec2 x : {Vec2(0, 0.3), Vec2(0.8, 0.6), Vec2(-0.2, 0.21)}) {
    b.eval(x, v, gx, gy);
    EXPECT_NEAR(v[0], 1.0 / std::sqrt(box.area()), 1e-14);
    EXPECT_EQ(gx[0], 0.0);
    EXPECT_EQ(gy[0], 0.0);
  }
}

TEST(Basis, GradientsMatchFiniteDifferences) {
  const BBox box{{1.0, -2.0}, {1.5, -1.2}};
  const ScaledLegendre b(box, 6);
  const int n = b.size();
  const double h = 1e-6 * 0.8;
  Eigen::VectorXd v(n), gx(n), gy(n), vp(n), vm(n), t1(n), t2(n);
  for (const Vec2 x : {Vec2(1.1, -1.9), Vec2(1.37, -1.5), Vec2(1.49, -1.21)}) {
    b.eval(x, v, gx, gy);
    b.eval(x + Vec2(h, 0), vp, t1, t2);
    b.eval(x - Vec2(h, 0), vm, t1, t2);
    const Eigen::VectorXd fdx = (vp - vm) / (2 * h);
    b.eval(x + Vec2(0, h), vp, t1, t2);
    b.eval(x - Vec2(0, h), vm, t1, t2);
    const Eigen::VectorXd fdy = (vp - vm) / (2 * h);
    const double scale = std::max(gx.cwiseAbs().maxCoeff(), gy.cwiseAbs().maxCoeff());
    for (int k = 0; k < n; ++k) {
      EXPECT_NEAR(fdx[k], gx[k], 1e-6 * scale) << k;
      EXPECT_NEAR(fdy[k], gy[k], 1e-6 * scale) << k;
    }
  }
}

TEST(Basis, OrthonormalOnSquareElement) {
  const FESpace s(unit_square(1), 5, 5);
  const Eigen::MatrixXd M = s.local_mass(0);
  EXPECT_LE((M - Eigen::MatrixXd::Identity(M.rows(), M.cols())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Quadrature, ElementRulesOnVoronoiCells) {
  const auto mesh = strip(30, 11);
  const FESpace s(mesh, 3, 3);
  for (int e = 0; e < mesh->num_elements(); ++e) {
    const int ord = s.order(e);
    const auto r = s.element_rule(e, ord);
    const auto poly = mesh->polygon(e);
    // Shift to the centroid so the monomials are well scaled.
    std::vector<Eigen::Vector2d> shifted;
    const Vec2 c = mesh->element(e).centroid;
    for (const auto& p : poly) shifted.push_back(p - c);
    for (int a = 0; a <= ord; ++a)
      for (int b = 0; a + b <= ord; ++b) {
        double sq = 0.0;
        for (std::size_t q = 0; q < r.w.size(); ++q)
          sq += r.w[q] * std::pow(r.x[q].x() - c.x(), a) * std::pow(r.x[q].y() - c.y(), b);
        const double exact = oracle::polygon_monomial(shifted, a, b);
        const double ref = oracle::polygon_monomial(shifted, 0, 0) *
                           std::pow(mesh->element(e).diameter, a + b);
        EXPECT_NEAR(sq, exact, 1e-12 * ref) << "e=" << e << " a=" << a << " b=" << b;
      }
  }
  for (int f = 0; f < mesh->num_faces(); ++f) {
    const auto r = s.face_rule(f, 8);
    double sum = 0.0;
    for (double w : r.w) sum += w;
    EXPECT_NEAR(sum, mesh->face(f).length, 1e-13);
  }
}

TEST(Projection, ConstantZeroAndPolynomialFields) {
  const auto mesh = strip(20);
  const FESpace s(mesh, 1, 1);
  const auto U = s.project([](const Vec2&) { return Vec2(1, 1); }, Field::Elastic);
  for (int e = 0; e < mesh->num_elements(); ++e) {
    if (!s.has(e, Field::Elastic)) continue;
    const auto v = s.evaluate(U, e, Field::Elastic, mesh->element(e).centroid);
    EXPECT_NEAR(v.x(), 1.0, 1e-12);
    EXPECT_NEAR(v.y(), 1.0, 1e-12);
  }
  const auto Z = s.project([](const Vec2&) { return Vec2(0, 0); }, Field::Fluid);
  EXPECT_EQ(Z.cwiseAbs().maxCoeff(), 0.0);

  const FESpace s3(mesh, 3, 3);
  auto poly = [](const Vec2& x) {
    return Vec2(1 + x.x() - 2 * x.y() * x.y() + x.x() * x.x() * x.y(), x.y() * x.y() * x.y() - 3 * x.x());
  };
  const auto P = s3.project(poly, Field::Solid);
  for (int e = 0; e < mesh->num_elements(); ++e) {
    if (!s3.has(e, Field::Solid)) continue;
    const auto r = s3.element_rule(e, s3.order(e));
    for (const auto& x : r.x) {
      const Vec2 d = s3.evaluate(P, e, Field::Solid, x) - poly(x);
      EXPECT_LE(d.norm(), 1e-10);
    }
  }
}

TEST(Projection, ConvergesAtOptimalRate) {
  constexpr double pi = std::numbers::pi;
  const int p = 4;
  auto ue = [](const Vec2& x) {
    return Vec2(x.x() * x.x() * std::sin(2 * pi * x.x()), x.x() * x.x() * std::sin(4 * pi * x.x()));
  };
  std::vector<double> hs, errs;
  for (int n : {16, 64, 256}) {
    const auto mesh = unit_square(n, 5);
    const FESpace s(mesh, p, p);
    const auto U = s.project(ue, Field::Elastic);
    double err2 = 0.0;
    for (int e = 0; e < mesh->num_elements(); ++e) {
      const auto r = s.element_rule(e, 2 * p + 6);
      for (std::size_t q = 0; q < r.w.size(); ++q)
        err2 += r.w[q] * (s.evaluate(U, e, Field::Elastic, r.x[q]) - ue(r.x[q])).squaredNorm();
    }
    hs.push_back(std::sqrt(1.0 / n));
    errs.push_back(std::sqrt(err2));
  }
  const double slope = oracle::loglog_slope(hs, errs);
  EXPECT_GT(slope, p + 1 - 0.35);
  EXPECT_LT(errs.back(), errs.front());
}

TEST(TraceInverse, BoundedOverMesh) {
  const auto mesh = strip(100);
  for (int p : {1, 3}) {
    const FESpace s(mesh, p, p);
    double cmax = 0.0;
    for (int e = 0; e < mesh->num_elements(); ++e) {
      const double c = s.trace_inverse_constant(e);
      EXPECT_TRUE(std::isfinite(c));
      cmax = std::max(cmax, c);
    }
    EXPECT_LT(cmax, 20.0);
  }
}

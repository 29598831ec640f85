#include "xtpoly/materials.hpp"

#include "xtpoly/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace xtpoly {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ParameterError(msg);
}

bool finite_all(std::initializer_list<double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

void validate(const ElasticParams& p) {
  require(finite_all({p.rho, p.lambda, p.mu, p.zeta}), "elastic parameters must be finite");
  require(p.rho > 0.0, "elastic density must be positive");
  require(p.mu > 0.0, "elastic shear modulus mu must be positive");
  require(p.lambda >= 0.0, "elastic lambda must be non-negative");
  require(p.zeta >= 0.0, "elastic damping zeta must be non-negative");
}

std::vector<std::string> validate(const PoroParams& p) {
  require(finite_all({p.rho_s, p.rho_f, p.phi, p.a, p.eta, p.k, p.lambda, p.mu, p.m, p.beta,
                      p.zeta}),
          "poroelastic parameters must be finite");
  require(p.phi > 0.0 && p.phi < 1.0, "porosity phi must lie in (0, 1)");
  require(p.a >= 1.0, "tortuosity a must be >= 1");
  require(p.rho_s > 0.0, "solid density rho_s must be positive");
  require(p.rho_f >= 0.0, "fluid density rho_f must be non-negative");
  require(p.eta >= 0.0, "fluid viscosity eta must be non-negative");
  require(p.k > 0.0, "permeability k must be positive");
  require(p.mu > 0.0, "poroelastic shear modulus mu must be positive");
  require(p.lambda >= 0.0, "poroelastic lambda must be non-negative");
  require(p.m > 0.0, "Biot modulus m must be positive");
  require(p.beta > 0.0 && p.beta <= 1.0, "Biot-Willis coefficient beta must lie in (0, 1]");
  require(p.zeta >= 0.0, "poroelastic damping zeta must be non-negative");
  std::vector<std::string> warnings;
  if (!(p.beta > p.phi))
    warnings.push_back("Biot-Willis coefficient beta = " + std::to_string(p.beta) +
                       " is not greater than porosity phi = " + std::to_string(p.phi));
  return warnings;
}

DerivedPoro derive_poro(const PoroParams& p) {
  validate(p);
  DerivedPoro d;
  d.rho_p = p.phi * p.rho_f + (1.0 - p.phi) * p.rho_s;
  d.rho_w = p.a / p.phi * p.rho_f;
  d.rho_u = 0.5 * (1.0 - p.phi) * p.rho_s;
  d.lambda_f = p.lambda + p.beta * p.beta * p.m;
  d.rho_shear = d.rho_p - p.rho_f * p.phi / p.a;
  require(d.rho_p > 0.0, "average density rho_p must be positive");
  // A rho_w of zero (rho_f = 0) leaves the fluid mass block singular.
  require(d.rho_p * d.rho_w - p.rho_f * p.rho_f > 0.0 && d.rho_w > 0.0,
          "poroelastic mass block [[rho_p, rho_f], [rho_f, rho_w]] is not positive definite");
  const auto s = poro_speeds(p);
  d.c_p1 = s.c_p1;
  d.c_p2 = s.c_p2;
  d.c_s = s.c_s;
  return d;
}

ElasticSpeeds elastic_speeds(const ElasticParams& p) {
  validate(p);
  return {std::sqrt((p.lambda + 2.0 * p.mu) / p.rho), std::sqrt(p.mu / p.rho)};
}

PoroSpeeds poro_speeds(const PoroParams& p) {
  validate(p);
  const double rho_p = p.phi * p.rho_f + (1.0 - p.phi) * p.rho_s;
  const double rho_w = p.a / p.phi * p.rho_f;
  Eigen::Matrix2d A, B;
  A << rho_p, p.rho_f, p.rho_f, rho_w;
  B << p.lambda + 2.0 * p.mu + p.m * p.beta * p.beta, p.m * p.beta, p.m * p.beta, p.m;
  require(A.determinant() > 0.0 && A(0, 0) > 0.0, "density matrix is not positive definite");
  require(B.determinant() > 0.0 && B(0, 0) > 0.0, "stiffness matrix is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(B, A);
  if (es.info() != Eigen::Success) throw ParameterError("wave-speed eigenproblem failed");
  const auto& ev = es.eigenvalues();  // ascending
  require(ev(0) > 0.0, "wave-speed eigenvalues must be positive");
  const double rho_shear = rho_p - p.rho_f * p.phi / p.a;
  require(rho_shear > 0.0, "shear density rho_p - rho_f phi / a must be positive");
  return {std::sqrt(ev(1)), std::sqrt(ev(0)), std::sqrt(p.mu / rho_shear)};
}

}  // namespace xtpoly

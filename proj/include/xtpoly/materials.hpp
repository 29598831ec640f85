#pragma once

#include <string>
#include <vector>

namespace xtpoly {

struct ElasticParams {
  double rho = 1.0;
  double lambda = 1.0;
  double mu = 1.0;
  double zeta = 0.0;
};

struct PoroParams {
  double rho_s = 1.0;
  double rho_f = 1.0;
  double phi = 0.5;
  double a = 1.0;
  double eta = 1.0;
  double k = 1.0;
  double lambda = 1.0;
  double mu = 1.0;
  double m = 1.0;
  double beta = 1.0;
  double zeta = 0.0;
};

struct DerivedPoro {
  double rho_p = 0.0;
  double rho_w = 0.0;
  double rho_u = 0.0;
  double lambda_f = 0.0;
  double c_p1 = 0.0;  // fast compressional
  double c_p2 = 0.0;  // slow compressional
  double c_s = 0.0;
  double rho_shear = 0.0;  // rho_p - rho_f phi / a
};

struct ElasticSpeeds {
  double c_p = 0.0;
  double c_s = 0.0;
};

struct PoroSpeeds {
  double c_p1 = 0.0;
  double c_p2 = 0.0;
  double c_s = 0.0;
};

/// Throws ParameterError on a violated invariant.
void validate(const ElasticParams& p);

/// Throws ParameterError on a violated invariant; returns soft warnings.
std::vector<std::string> validate(const PoroParams& p);

DerivedPoro derive_poro(const PoroParams& p);
ElasticSpeeds elastic_speeds(const ElasticParams& p);
PoroSpeeds poro_speeds(const PoroParams& p);

/// Largest eigenvalue bound of the stiffness tensor used by the penalty functions.
inline double stiffness_bound(double lambda, double mu) { return 2.0 * (lambda + mu); }

}  // namespace xtpoly

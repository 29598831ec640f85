#pragma once

#include "xtpoly/assembly.hpp"
#include "xtpoly/timedg.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace xtpoly {

/// Closed-form coupled solution on (-1,0)x(0,1) (poroelastic) and (0,1)x(0,1) (elastic):
///   u_e = cos(4 pi t) [x^2 sin(2 pi x), x^2 sin(4 pi x)]
///   u_p = cos(sqrt(2) pi t) [g, g],  g = x^2 cos(pi x / 2) sin(pi x)
///   u_f = -u_p
/// Forcing and Dirichlet data follow from the strong equations with any material set.
/// The fields satisfy the interface conditions for every delta.
class ManufacturedCase {
 public:
  /// Unit parameters except phi = 0.5, elastic lambda = 2, zeta = eta = 1, delta = 1.
  ManufacturedCase();
  /// `amplitude` scales all fields and data (0 gives the zero solution).
  ManufacturedCase(Materials materials, double delta, double amplitude = 1.0);

  static Materials default_materials();

  const Materials& materials() const { return mat_; }
  double delta() const { return delta_; }
  double amplitude() const { return amp_; }
  std::vector<RegionRect> regions() const;

  Vec2 displacement(Field f, const Vec2& x, double t) const;
  Vec2 velocity(Field f, const Vec2& x, double t) const;
  Vec2 acceleration(Field f, const Vec2& x, double t) const;
  /// Row r holds the gradient of component r.
  Eigen::Matrix2d gradient(Field f, const Vec2& x, double t) const;
  /// Right-hand side of the elastic, solid or fluid equation.
  Vec2 forcing(Field f, const Vec2& x, double t) const;

  LoadData loads() const;
  /// L2 projections of the exact displacement and velocity at time t.
  SlabState projected_state(const FESpace& space, double t) const;

 private:
  Materials mat_;
  DerivedPoro der_;
  double delta_;
  double amp_;
};

/// Components of the dG energy error. Squared quantities are summed into `energy`.
struct ErrorReport {
  double h = 0.0;
  int n_elements = 0;
  int p = 0;
  double dt = 0.0;
  int r = 0;
  double t = 0.0;
  double l2 = 0.0;         // weighted L2 norm of the displacement error
  double energy = 0.0;     // full energy norm
  double kinetic = 0.0;    // weighted L2 norm of the velocity error
  double dg_e = 0.0;       // elastic dG norm
  double dg_p = 0.0;       // solid dG norm
  double dg_div = 0.0;     // dG seminorm of beta u_p + u_f
  double interface = 0.0;  // interface seminorm
  double damping = 0.0;    // sqrt of the damping integral plus the initial damping term
  double wall_s = 0.0;
  double cond_est = 0.0;   // 1-norm condition estimate of the slab matrix (0 if not computed)
};

/// Error norms against a manufactured solution with cached quadrature tables.
/// Integrals use order 2p + 4 on elements and faces.
class ErrorEvaluator {
 public:
  ErrorEvaluator(const Assembler& assembler, const ManufacturedCase& mcase);

  /// Weighted L2 norm of u(t) - U (squared).
  double l2_squared(const Eigen::VectorXd& U, double t) const;
  /// Weighted L2 norm of du/dt(t) - V (squared).
  double kinetic_squared(const Eigen::VectorXd& V, double t) const;
  /// D(e, e) with e = du/dt(t) - X, or e = u(t) - X when `velocity` is false.
  double damping_form(const Eigen::VectorXd& X, double t, bool velocity = true) const;

  struct Seminorms {
    double dg_e = 0.0, dg_p = 0.0, dg_div = 0.0, interface = 0.0;  // squared
  };
  Seminorms seminorms(const Eigen::VectorXd& U, double t) const;

  /// Fills the norm fields of a report. `damping_integral` is the accumulated
  /// time integral of D(e', e') and `initial_damping` the term D(e, e)(0).
  void fill(ErrorReport& rep, const SlabState& s, double damping_integral,
            double initial_damping) const;

 private:
  struct ElementTable {
    int e;
    quad::Rule2D rule;
    BasisTable basis;
  };
  struct FaceTable {
    int f;
    int e0, e1;  // e1 = -1 on boundary faces
    Vec2 n;
    quad::Rule2D rule;
    BasisTable b0, b1;
  };

  template <class Fn>
  double element_sum(const Eigen::VectorXd& X, double t, bool velocity, Fn&& fn) const;

  const Assembler& asm_;
  const ManufacturedCase& case_;
  std::vector<ElementTable> elems_;
  std::vector<FaceTable> faces_;
};

/// One discretization of the manufactured problem.
struct RunParams {
  int n_elements = 100;
  int p = 2;
  double dt = 1e-3;
  int r = 1;
  double T = 1.0;
  std::uint64_t seed = 1;
  PenaltyParams penalty;
  bool condition = false;  // estimate the slab matrix condition number
};

/// Builds mesh, space and operators, integrates to T and returns the errors at T.
ErrorReport solve_manufactured(const ManufacturedCase& mcase, const RunParams& params);

/// Least-squares slope of log(y) against log(x).
double least_squares_slope(std::span<const double> x, std::span<const double> y);

enum class SweepVariable : std::uint8_t { H, P, Dt, R };
std::string to_string(SweepVariable v);

struct StudyRow {
  ErrorReport report;
  double slope_so_far = 0.0;  // least-squares slope of the sweep metric over rows 0..i
  double pairwise = 0.0;      // log ratio against the previous row (0 for row 0)
};

struct StudyResult {
  SweepVariable variable = SweepVariable::H;
  std::string metric = "energy";  // "energy" or "l2"
  std::vector<StudyRow> rows;
  double slope = 0.0;     // least squares over all rows (semilog decay rate for p sweeps)
  bool monotone = true;   // errors decrease along the sweep
};

/// Runs every point in order. At least three points are required. For h and dt sweeps
/// the slope is d log(err) / d log(x); for p and r sweeps it is d log(err) / d x.
StudyResult convergence_study(const ManufacturedCase& mcase, const std::vector<RunParams>& points,
                              SweepVariable variable, const std::string& metric = "energy",
                              std::ostream* progress = nullptr);

/// Columns: h,p,dt,r,L2,energy,slope_so_far,wall_s,cond_est
void write_study_csv(const std::filesystem::path& path, const StudyResult& res);
void write_study_report(std::ostream& out, const StudyResult& res);

}  // namespace xtpoly

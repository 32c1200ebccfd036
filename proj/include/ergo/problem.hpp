#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace ergo {

class Grid;

struct PolyTerm {
  int degree = 0;  // 0..4
  double coeff = 0.0;
};

struct Bump {
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;  // > 0
};

/// constant + sum c_k x^k + sum A exp(-(x-m)^2 / (2 s^2)).
/// Derivatives are evaluated from the closed form.
struct CoefficientModel1D {
  double constant = 0.0;
  std::vector<PolyTerm> poly;
  std::vector<Bump> bumps;

  static CoefficientModel1D constant_field(double c);
  static CoefficientModel1D monomial(int degree, double coeff);
  static CoefficientModel1D bump(double amplitude, double center, double width);

  /// Coefficient of x^k collected over constant and poly terms.
  double poly_coeff(int k) const;
  /// Highest degree with a nonzero polynomial coefficient, or -1 if the
  /// polynomial part (constant included) vanishes.
  int leading_degree(double zero_tol = 0.0) const;
  /// True when no poly term of degree >= 1 is present.
  bool is_bounded() const;
  bool has_bumps() const { return !bumps.empty(); }
  /// Pure constant (no poly of degree >= 1, no bumps).
  bool is_constant() const;

  CoefficientModel1D scaled(double factor) const;
};

CoefficientModel1D operator+(const CoefficientModel1D& lhs, const CoefficientModel1D& rhs);

/// order in {0, 1, 2}; otherwise PreconditionViolation.
double eval_coeff(const CoefficientModel1D& c, double x, int order = 0);

/// sup |c| sampled on [-radius, radius]; exact for bounded fields whose
/// bumps lie inside the window.
double sup_abs(const CoefficientModel1D& c, double radius, std::size_t samples = 4001);

struct Pde1D {
  CoefficientModel1D a;
  CoefficientModel1D ahat;
  CoefficientModel1D b;
  CoefficientModel1D v0;
  CoefficientModel1D vbar;
  CoefficientModel1D w0;  // supersolution, also the default Dirichlet data
  double domain_radius = 8.0;

  double V(double x) const { return eval_coeff(v0, x) + eval_coeff(vbar, x); }
  /// b~ = b + a'/2.
  double btilde(double x) const { return eval_coeff(b, x) + 0.5 * eval_coeff(a, x, 1); }
};

struct LeqgNd {
  Eigen::MatrixXd D;
  Eigen::MatrixXd M;
  Eigen::MatrixXd a;
  Eigen::MatrixXd ahat;
  Eigen::VectorXd v;

  Eigen::Index dim() const { return D.rows(); }
};

struct ProblemSpec {
  std::string name;
  std::variant<Pde1D, LeqgNd> data;

  bool is_pde() const { return std::holds_alternative<Pde1D>(data); }
  /// Throws PreconditionViolation when the kind does not match.
  const Pde1D& pde() const;
  Pde1D& pde();
  const LeqgNd& leqg() const;
};

/// Structural invariants: a and ahat bounded (no poly of degree >= 1),
/// degrees <= 4, widths > 0; LEQG shapes, symmetry and definiteness.
/// Throws ConfigError naming the offending field.
void check_structure(const ProblemSpec& spec);

struct AssumptionReport {
  double nu1 = 0, nu2 = 0;
  double mu1 = 0, mu2 = 0;
  double c_low = 0, c_high = 0;
  double window_radius = 0;
  std::vector<double> annulus_outer_radii;
  std::vector<double> u0_annulus_min;
  bool a1_passed = false;
  bool a2_passed = false;
  bool a3_passed = false;
  /// "checked on window" when the annulus trend holds, "bounded only" when
  /// U0 is merely bounded below on the window, "failed" otherwise.
  std::string a3_note;

  bool all_passed() const { return a1_passed && a2_passed && a3_passed; }
};

/// For Pde1D: NonElliptic when sampled a or ahat is <= 0.
/// For LeqgNd: eigenvalue bounds of a and ahat; (A3) is M negative definite.
AssumptionReport validate_assumptions(const ProblemSpec& spec, double window_radius = 12.0,
                                      int annuli = 12);

/// U0 = -(1/2 (a W0')' + 1/2 ahat W0'^2 + b W0' + V0).
double u0_at(const Pde1D& p, double x);

/// +0.1x^2 for an inward leading drift, -0.1x^2 for an outward one, 0 when
/// V0 -> -infinity.
CoefficientModel1D default_supersolution(const CoefficientModel1D& b, const CoefficientModel1D& v0);

ProblemSpec builtin(const std::string& name);
std::vector<std::string> builtin_names();

/// Linear-quadratic data of a 1-D problem: a, ahat constant, b = D x,
/// V = M x^2 / 2 + v x + c0. Empty when the problem is outside that family.
struct Leqg1D {
  double D = 0, M = 0, a = 1, ahat = 1, v = 0, c0 = 0;
};
std::optional<Leqg1D> leqg_view(const Pde1D& p);

/// Coordinate i of a decoupled (diagonal) LEQG system as a 1-D problem.
/// PreconditionViolation when any matrix is not diagonal.
ProblemSpec project_coordinate(const ProblemSpec& spec, Eigen::Index i);

ProblemSpec with_vbar(const ProblemSpec& spec, const CoefficientModel1D& vbar);
/// Adds alpha to V0.
ProblemSpec with_shift(const ProblemSpec& spec, double alpha);

/// Coefficient values at grid nodes.
struct SampledCoefficients {
  std::vector<double> a, da, ahat, b, btilde, v0, V;
};
SampledCoefficients sample_coefficients(const Pde1D& p, const Grid& grid);

}  // namespace ergo

#pragma once

#include <string>
#include <vector>

#include "ergo/classify.hpp"
#include "ergo/lambdastar.hpp"

namespace ergo {

/// Grid density with unit trapezoid mass. `truncation_mass` estimates the
/// mass beyond the grid relative to the mass on it.
struct Measure1D {
  Grid grid;
  Field density;
  double total_mass = 1.0;
  double truncation_mass = 0.0;

  double integrate(const Field& f) const;
};

/// Normalizes `density` (must be >= 0 with positive mass).
Measure1D make_measure(Field density);
Measure1D gaussian_measure(const Grid& grid, double mean, double sd);

/// 1/2 (a W')' + b W' + 1/2 ahat W'^2 + V0, exact a' and stencil derivatives
/// of W (one-sided at the ends).
Field G_functional(const ProblemSpec& spec, const Field& W);

struct TestFunction {
  std::string name;
  Field W;
};

/// Proxy for "G(W) bounded above": on interior nodes, the max over
/// |x| >= 3R/4 does not exceed the max over |x| < 3R/4 by more than
/// 1e-6 (1 + |inner max|).
bool bounded_above_on_grid(const Field& G);

struct JLowerResult {
  double value = 0.0;
  std::string best;
  std::vector<std::string> skipped;
  std::size_t used = 0;
};

/// max over admissible family members of -int G(W) dmu. Members failing the
/// bounded-above proxy are skipped and listed. Throws EmptyFamily.
JLowerResult J_lower(const ProblemSpec& spec, const Measure1D& mu, const std::vector<TestFunction>& family);

/// {0, +W0, -W0, K x^2 / 2 for K in -1, -0.75, ..., 1, bumps +-0.5 exp(-x^2/2),
/// and W* when given}.
std::vector<TestFunction> default_test_family(const ProblemSpec& spec, const Grid& grid,
                                              const std::optional<Field>& w_star = std::nullopt);

/// (2/a) exp(int_0^x 2m/a), normalized. Throws NotErgodic unless
/// scale_classify at 0.8 R says Ergodic.
Measure1D invariant_density(const DriftField& d);

/// Discrete L* p with exponentially fitted edge fluxes
/// F = (1/2h) B(D) (u_{i+1} - e^D u_i), u = a p, D = trapezoid int 2m/a over
/// the edge, B(D) = D / (e^D - 1). Ends carry 0.
Field adjoint_residual(const DriftField& d, const Field& p);

struct DualityReport {
  double lambda_star_of_V = 0.0;
  double pairing = 0.0;       // <vbar, mu*>
  double J_at_mu_star = 0.0;  // lower bound
  double gap = 0.0;           // lambda*(vbar) - (pairing - J)
  double moment_lhs = 0.0;    // int U0 dmu*
  double moment_rhs = 0.0;    // -lambda*(vbar) + sup|vbar|
  double truncation_mass = 0.0;
  std::string best_test;
  LambdaStarResult lambda_result;
  Measure1D mu_star;
};

/// Lambda*(V0 + vbar), mu* from the induced drift, J from the default family
/// (with W*) plus `extra`. vbar must be bounded.
DualityReport duality_check(const ProblemSpec& spec, const CoefficientModel1D& vbar,
                            const std::vector<TestFunction>& extra = {}, double tol = 1e-6);

struct PerturbationRow {
  std::size_t index = 0;
  double lambda = 0.0;
  double delta = 0.0;         // |lambda_n - lambda_base|
  double sup_distance = 0.0;  // sup_{|x| <= window} |W_n - W|
};

struct PerturbationTable {
  double lambda_base = 0.0;
  double window = 2.0;
  std::vector<PerturbationRow> rows;
};

/// Base problem has vbar = 0; row n uses vbar_sequence[n].
PerturbationTable perturbation_sweep(const ProblemSpec& spec, const std::vector<CoefficientModel1D>& vbar_sequence,
                                     double window = 2.0, double tol = 1e-6);

}  // namespace ergo

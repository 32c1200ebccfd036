#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ergo/dirichlet.hpp"

namespace ergo {

/// kappa with ahat = kappa * a within 1e-12 on [-window, window], else empty.
std::optional<double> kappa_of(const ProblemSpec& spec, double window = 12.0);

struct EigenPair {
  double lambda0 = 0.0;  // eigenvalue / kappa
  Field phi;             // > 0 inside, 0 at the ends, max 1
  int iterations = 0;
};

/// Principal eigenpair of 1/2 a d2 + b~ d + kappa V with zero Dirichlet ends,
/// by shifted inverse iteration. `warm` seeds the iteration. Throws
/// PerronViolation if the converged vector changes sign.
EigenPair principal_eigenvalue(const ProblemSpec& spec, const Grid& grid, double kappa,
                               const std::optional<Field>& warm = std::nullopt);

/// Eigenvalue extrapolated from spacings h and 2h: (4 l_h - l_2h) / 3.
/// The grid's interval count must be divisible by 4.
double richardson_eigenvalue(const ProblemSpec& spec, const Grid& grid, double kappa, EigenPair* fine = nullptr,
                             const std::optional<Field>& warm = std::nullopt);

enum class Method { Spectral, Bisection };
std::string to_string(Method m);

struct LambdaStarOptions {
  std::vector<double> radii{4.0, 6.0, 8.0, 10.0, 12.0};
  double h = 0.008;
  bool richardson = true;
  /// Ergodic Neumann polish of log(phi) / kappa on the inner window.
  bool polish = true;
  double inner_fraction = 0.9;
};

struct LambdaStarResult {
  double lambda_star = 0.0;
  GridSolution w_star;
  Method method = Method::Spectral;
  std::optional<double> kappa;
  std::vector<std::pair<double, double>> R_trace;
  bool converged = false;
  bool trace_monotone = true;
  bool heuristic = false;
  /// Lambda of the polished discrete solution (equals lambda_star up to the
  /// scheme's truncation error).
  double polish_lambda = 0.0;
  std::string note;
};

/// Spectral route when kappa_of succeeds; otherwise bisection on an
/// automatic bracket. Throws NotConverged when the radius schedule runs out.
LambdaStarResult lambda_star(const ProblemSpec& spec, double tol = 1e-6, const LambdaStarOptions& opts = {});

/// Classification flip point on the default grid (radius = domain radius,
/// spacing 0.008). Heuristic. Throws BadBracket when both ends agree.
LambdaStarResult lambda_star_bisect(const ProblemSpec& spec, std::pair<double, double> bracket, double tol = 1e-3,
                                    const NewtonOptions& newton = {});

/// Bracket from the spectral values of the problems with ahat replaced by
/// c_low a and c_high a, widened by `margin` on both sides.
std::pair<double, double> automatic_bracket(const ProblemSpec& spec, double margin = 0.25);

}  // namespace ergo

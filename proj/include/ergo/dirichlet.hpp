#pragma once

#include <optional>
#include <vector>

#include "ergo/grid.hpp"
#include "ergo/problem.hpp"

namespace ergo {

struct GridSolution {
  Grid grid;
  Field W;               // normalized: W(normalized_at) = 0
  double lambda = 0.0;
  double residual_norm = 0.0;  // max |interior residual|
  double normalized_at = 0.0;
  double offset = 0.0;   // value subtracted by the normalization
  int iterations = 0;
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double armijo_factor = 0.5;
  double min_step = 1e-6;
  /// Fall back to domain-growth continuation when the direct solve stalls.
  bool continuation = true;
  double continuation_start = 1.0;
  double continuation_step = 0.5;
};

/// Interior node i: 1/2 a d2W + 1/2 ahat (dW)^2 + b~ dW + V - lambda with
/// central stencils; boundary nodes carry 0.
Field residual(const ProblemSpec& spec, const Grid& grid, const Field& W, double lambda);

/// Damped Newton for the Dirichlet problem on the grid. `boundary` supplies
/// the endpoint values (continuation stages read it at their window ends);
/// defaults to W0. `init` defaults to W0. Throws NoConvergence.
GridSolution solve_dirichlet(const ProblemSpec& spec, const Grid& grid, double lambda,
                             const std::optional<Field>& boundary = std::nullopt,
                             const std::optional<Field>& init = std::nullopt, const NewtonOptions& opts = {});

/// Ergodic problem on the grid with prescribed end slopes: unknowns are W
/// (with W(0) = 0) and lambda. Same interior stencils as `residual`; ends use
/// ghost nodes carrying the slopes. Throws NoConvergence.
GridSolution solve_ergodic_neumann(const ProblemSpec& spec, const Field& init, double lambda_init,
                                   double slope_left, double slope_right, const NewtonOptions& opts = {});

struct GradientRow {
  double R = 0.0;
  double sup_gradient = 0.0;  // sup_{|x| <= r} |W_R'|
};

struct GradientSweep {
  double lambda = 0.0;
  double r = 0.0;
  std::vector<GradientRow> rows;
  double mean = 0.0;
  double spread = 0.0;           // max - min
  double relative_spread = 0.0;  // spread / mean
};

/// Each R must be at least 2r (PreconditionViolation). All radii share spacing h.
GradientSweep gradient_bound_sweep(const ProblemSpec& spec, double lambda, double r,
                                   const std::vector<double>& R_list, double h = 0.008,
                                   const NewtonOptions& opts = {});

/// sup^2 <= C_r + C lambda, C >= 0: least-squares slope clipped at zero, then
/// the intercept raised until every point lies on or under the line.
struct AffineBound {
  double C_r = 0.0;
  double C = 0.0;
  double max_violation = 0.0;  // max(sup^2 - (C_r + C lambda)) after lifting, <= 0
};
AffineBound fit_affine_bound(const std::vector<double>& lambdas, const std::vector<double>& sup_values);

}  // namespace ergo

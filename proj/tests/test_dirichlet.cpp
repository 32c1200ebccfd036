#include <cmath>

#include "support.hpp"

#include "ergo/dirichlet.hpp"
#include "ergo/leqg.hpp"

using namespace ergo;

namespace {

Field quadratic(const Grid& g, double K, double e = 0.0) {
  return sample(g, [K, e](double x) { return 0.5 * K * x * x + e * x; });
}

double max_error(const Field& W, const Field& ref, double r) {
  double err = 0.0;
  for (std::size_t i = 0; i < W.size(); ++i) {
    if (std::abs(W.grid.x(i)) <= r + 1e-12) err = std::max(err, std::abs(W[i] - ref[i]));
  }
  return err;
}

ProblemSpec drift_only() {
  ProblemSpec s = builtin("ou-quadratic");
  s.pde().v0 = {};
  s.pde().w0 = {};
  return s;
}

}  // namespace

TEST_CASE("residual vanishes on the stabilizing quadratic") {
  const ProblemSpec s = builtin("ou-quadratic");
  // sampling error of W alone is ~ |W| eps / h^2, so the 1e-12 level needs a coarse grid
  const Grid g = make_grid(4.0, 81);
  CHECK(sup_norm_window(residual(s, g, quadratic(g, oracle::kKMinus), oracle::kLambdaStar), 4.0) <= 1e-12);
  // production grid: round-off bound
  const Grid p = make_grid(8.0, 2001);
  const double floor = 8.0 * 0.5 * std::abs(oracle::kKMinus) * 64.0 * 2.2e-16 / (p.spacing() * p.spacing());
  CHECK(sup_norm_window(residual(s, p, quadratic(p, oracle::kKMinus), oracle::kLambdaStar), 8.0) <= floor);
}

TEST_CASE("residual of the zero field") {
  ProblemSpec s = drift_only();
  s.pde().b = CoefficientModel1D::monomial(1, 3.0) + CoefficientModel1D::bump(1.0, 0.5, 0.4);
  const Grid g = make_grid(2.0, 41);
  const Field zero = sample(g, [](double) { return 0.0; });
  CHECK(sup_norm_window(residual(s, g, zero, 0.0), 2.0) == 0.0);
  const Field r = residual(s, g, zero, 1.0);
  CHECK(r[0] == 0.0);
  CHECK(r[g.size() - 1] == 0.0);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(r[i] == -1.0);
}

TEST_CASE("solve at the critical value reproduces the quadratic in the bulk") {
  const ProblemSpec s = builtin("ou-quadratic");
  const Grid g = make_grid(8.0, 2001);
  const GridSolution sol = solve_dirichlet(s, g, oracle::kLambdaStar);
  CHECK(sol.residual_norm <= 1e-10);
  CHECK(sol.W[g.center()] == 0.0);
  CHECK(sol.normalized_at == 0.0);
  CHECK(max_error(sol.W, quadratic(g, oracle::kKMinus), 4.0) <= 1e-4);
}

TEST_CASE("second branch with its own boundary data") {
  const ProblemSpec s = builtin("ou-quadratic");
  const Grid g = make_grid(8.0, 2001);
  const Field q = quadratic(g, oracle::kKPlus);
  const GridSolution sol = solve_dirichlet(s, g, oracle::kLambdaPlus, q);
  CHECK(max_error(sol.W, q, 8.0) <= 1e-6);
}

TEST_CASE("zero potential and zero data give the zero solution") {
  const ProblemSpec s = drift_only();
  const Grid g = make_grid(4.0, 401);
  const GridSolution sol = solve_dirichlet(s, g, 0.0, sample(g, [](double) { return 0.0; }));
  CHECK(sup_norm_window(sol.W, 4.0) <= 1e-12);
}

TEST_CASE("exact quadratic data reproduce every linear-quadratic problem") {
  std::vector<ProblemSpec> specs;
  for (const auto& name : builtin_names()) {
    const ProblemSpec s = builtin(name);
    if (s.is_pde() && leqg_view(s.pde())) specs.push_back(s);
  }
  const ProblemSpec two = builtin("leqg-2d");
  for (Eigen::Index i = 0; i < two.leqg().dim(); ++i) specs.push_back(project_coordinate(two, i));
  REQUIRE(specs.size() >= 4);
  for (const auto& s : specs) {
    CAPTURE(s.name);
    const auto v = *leqg_view(s.pde());
    // independent closed form
    const double K = oracle::k_minus(v.D, v.M, v.ahat);
    const double e = -v.v / (v.D + v.ahat * K);
    const double lambda = 0.5 * v.a * K + 0.5 * v.ahat * e * e + v.c0;
    const Grid g = make_grid(6.0, 1201);
    const Field q = quadratic(g, K, e);
    const GridSolution sol = solve_dirichlet(s, g, lambda, q);
    CHECK(max_error(sol.W, q, 6.0) <= 1e-6);
  }
}

TEST_CASE("a constant added to the initial guess does not change the normalized solution") {
  const ProblemSpec s = builtin("ou-bounded-v");
  const Grid g = make_grid(6.0, 1201);
  const double lambda = 1.5;
  const Field init = sample(g, [](double x) { return 0.1 * x * x; });
  Field shifted = init;
  for (auto& v : shifted.values) v += 7.5;
  const GridSolution a = solve_dirichlet(s, g, lambda, std::nullopt, init);
  const GridSolution b = solve_dirichlet(s, g, lambda, std::nullopt, shifted);
  CHECK(max_error(a.W, b.W, 6.0) <= 1e-8);
}

TEST_CASE("interior error drops at second order under refinement") {
  const ProblemSpec s = builtin("ou-bounded-v");
  const double R = 4.0, lambda = 1.5;
  const GridSolution ref = solve_dirichlet(s, make_grid(R, 3201), lambda);
  auto err = [&](std::size_t n) {
    const GridSolution sol = solve_dirichlet(s, make_grid(R, n), lambda);
    const Field r = resample(ref.W, sol.grid);
    return max_error(sol.W, r, 2.0);
  };
  const double e1 = err(101), e2 = err(201);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("two solves at the critical value agree up to a constant") {
  const ProblemSpec s = builtin("ou-quadratic");
  const Grid g8 = make_grid(8.0, 2001), g10 = make_grid(10.0, 2501);
  const GridSolution a = solve_dirichlet(s, g8, oracle::kLambdaStar);
  const GridSolution b = solve_dirichlet(s, g10, oracle::kLambdaStar, std::nullopt,
                                         sample(g10, [](double x) { return 3.0 - 0.2 * x * x; }));
  const Grid w = g8.window(2.0);
  Field ra = resample(a.W, w), rb = resample(b.W, w);
  normalize_at_center(ra);
  normalize_at_center(rb);
  CHECK(max_error(ra, rb, 2.0) <= 1e-4);
}

TEST_CASE("below the critical value the solver reports NoConvergence") {
  const ProblemSpec s = builtin("ou-quadratic");
  CHECK_ERROR_KIND(solve_dirichlet(s, make_grid(8.0, 2001), oracle::kLambdaStar - 0.5), ErrorKind::NoConvergence);
}

TEST_CASE("gradient bound sweep") {
  const ProblemSpec s = builtin("ou-quadratic");
  const GradientSweep sw = gradient_bound_sweep(s, oracle::kLambdaStar, 2.0, {4, 6, 8, 10});
  REQUIRE(sw.rows.size() == 4);
  CHECK(sw.relative_spread <= 0.05);
  // |W'| = |K_-| |x| on the window
  CHECK(sw.mean == doctest::Approx(2.0 * std::abs(oracle::kKMinus)).epsilon(1e-3));

  std::vector<double> lambdas, sups;
  for (double d : {0.0, 1.0, 2.0}) {
    const GradientSweep row = gradient_bound_sweep(s, oracle::kLambdaStar + d, 2.0, {8});
    lambdas.push_back(oracle::kLambdaStar + d);
    sups.push_back(row.rows[0].sup_gradient);
  }
  const AffineBound ab = fit_affine_bound(lambdas, sups);
  CHECK(ab.C >= 0.0);
  CHECK(ab.max_violation <= 0.0);
  for (std::size_t k = 0; k < 3; ++k) CHECK(sups[k] * sups[k] <= ab.C_r + ab.C * lambdas[k] + 1e-12);

  CHECK_ERROR_KIND(gradient_bound_sweep(s, 0.0, 2.0, {3.0}), ErrorKind::PreconditionViolation);
}

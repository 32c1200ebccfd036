// Long Monte Carlo properties; registered under the "slow" label.
#include <cmath>

#include "support.hpp"

#include "ergo/classify.hpp"
#include "ergo/lambdastar.hpp"
#include "ergo/variational.hpp"

using namespace ergo;

namespace {

double l1_to_gaussian(const SimulationReport& r, double var) {
  double l1 = 0.0;
  for (std::size_t k = 0; k < r.occupation.size(); ++k) {
    const double x = r.occupation.grid.x(k);
    l1 += std::abs(r.occupation[k] - std::exp(-x * x / (2 * var)) / std::sqrt(2 * M_PI * var)) * r.bin_width;
  }
  return l1;
}

}  // namespace

TEST_CASE("occupation histogram approaches the invariant density as T grows") {
  const Grid g = make_grid(8.0, 2001);
  const DriftField d = DriftField::linear(g, -oracle::kSqrt2, 1.0);
  const double var = 1.0 / (2.0 * oracle::kSqrt2);
  const SimulationReport r50 = simulate_em(d, 0.0, 50.0, 1e-3, 2000, 42);
  CHECK(l1_to_gaussian(r50, var) <= 0.05);
  const SimulationReport r200 = simulate_em(d, 0.0, 200.0, 1e-3, 2000, 42);
  CHECK(l1_to_gaussian(r200, var) <= 0.03);
}

TEST_CASE("no explosion at the critical value") {
  const ProblemSpec s = builtin("ou-quadratic");
  const DriftField d = drift_of(s, lambda_star(s).w_star);
  const SimulationReport r = simulate_em(d, 0.0, 50.0, 1e-3, 10000, 42);
  CHECK(r.killed == 0);
}

TEST_CASE("decay estimates plateau at the critical value") {
  const ProblemSpec s = builtin("ou-quadratic");
  const LambdaStarResult ls = lambda_star(s);
  const DriftField d = drift_of(s, ls.w_star);
  const std::vector<double> times{2.0, 3.0, 4.0, 5.0, 6.0};
  const DecayFit fit = decay_rate_drift(d, {-1.0, 1.0}, 0.0, times, 10000, 1e-3, 42);
  // mu*([-1, 1]) for the Gaussian with variance 1 / (2 sqrt 2)
  const double var = 1.0 / (2.0 * oracle::kSqrt2);
  const double target = std::erf(1.0 / std::sqrt(2.0 * var));
  for (const auto& p : fit.points) CHECK(std::abs(p.estimate - target) <= 4.0 * p.stderr_ + 1e-3);
  CHECK(std::abs(fit.rho) <= 0.05);
}

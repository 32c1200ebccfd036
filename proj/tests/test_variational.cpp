#include <cmath>

#include "support.hpp"

#include "ergo/leqg.hpp"
#include "ergo/variational.hpp"

using namespace ergo;

TEST_CASE("G functional") {
  const ProblemSpec s = builtin("ou-quadratic");
  const Grid g = make_grid(6.0, 1201);
  const Field zero = sample(g, [](double) { return 0.0; });
  const Field G0 = G_functional(s, zero);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(G0[i] == doctest::Approx(eval_coeff(s.pde().v0, g.x(i))));

  const Field Gq = G_functional(s, sample(g, [](double x) { return 0.5 * oracle::kKMinus * x * x; }));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(Gq[i] - oracle::kLambdaStar) <= 1e-10);

  ProblemSpec b = builtin("ou-bounded-v");
  b.pde().a = CoefficientModel1D::constant_field(1.0) + CoefficientModel1D::bump(0.3, 0.2, 0.9);
  b.pde().ahat = b.pde().a;
  const Field w0 = sample(g, [&b](double x) { return eval_coeff(b.pde().w0, x); });
  const Field Gw = G_functional(b, w0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(Gw[i] == doctest::Approx(-u0_at(b.pde(), g.x(i))).epsilon(1e-9));
}

TEST_CASE("invariant densities of linear drifts") {
  const Grid g = make_grid(8.0, 2001);
  for (double slope : {-oracle::kSqrt2, -1.0}) {
    const Measure1D mu = invariant_density(DriftField::linear(g, slope, 1.0));
    CHECK(integrate(mu.density) == doctest::Approx(1.0).epsilon(1e-8));
    const double var = mu.integrate(sample(g, [](double x) { return x * x; }));
    CHECK(var == doctest::Approx(1.0 / (2.0 * -slope)).epsilon(1e-5));
    CHECK(mu.truncation_mass < 1e-12);
  }
  CHECK_ERROR_KIND(invariant_density(DriftField::linear(g, 1.0, 1.0)), ErrorKind::NotErgodic);
}

TEST_CASE("J lower bound at the invariant measure of the example") {
  const ProblemSpec s = builtin("ou-quadratic");
  const Grid g = make_grid(8.0, 2001);
  const Measure1D mu = invariant_density(DriftField::linear(g, -oracle::kSqrt2, 1.0));
  const Field wq = sample(g, [](double x) { return 0.5 * oracle::kKMinus * x * x; });
  const JLowerResult J = J_lower(s, mu, default_test_family(s, g, wq));
  CHECK(std::abs(J.value + oracle::kLambdaStar) <= 1e-4);
  CHECK(J.best == "W*");
  CHECK_FALSE(J.skipped.empty());

  const Field zero = sample(g, [](double) { return 0.0; });
  const double only_zero = J_lower(s, mu, {{"zero", zero}}).value;
  CHECK(only_zero == doctest::Approx(-mu.integrate(sample(g, [&s](double x) { return eval_coeff(s.pde().v0, x); }))));

  const Measure1D narrow = gaussian_measure(g, 0.0, 0.05);
  CHECK(J_lower(s, narrow, default_test_family(s, g)).value >= 0.0);
}

TEST_CASE("J lower rejects a family with no admissible member") {
  const ProblemSpec s = builtin("ou-quadratic");
  const Grid g = make_grid(8.0, 2001);
  const Measure1D mu = gaussian_measure(g, 0.0, 1.0);
  // K = -2 makes G grow like x^2 at infinity
  const Field bad = sample(g, [](double x) { return -x * x; });
  CHECK_FALSE(bounded_above_on_grid(G_functional(s, bad)));
  CHECK_ERROR_KIND(J_lower(s, mu, {{"bad", bad}}), ErrorKind::EmptyFamily);
}

TEST_CASE("duality on the example") {
  const DualityReport r = duality_check(builtin("ou-quadratic"), {});
  CHECK(r.gap <= 1e-4);
  CHECK(r.gap >= -1e-6);
  CHECK(r.pairing == 0.0);
  CHECK(r.J_at_mu_star == doctest::Approx(-oracle::kLambdaStar).epsilon(1e-6));
  CHECK(r.moment_lhs == doctest::Approx(1.0 / (4.0 * oracle::kSqrt2)).epsilon(1e-5));
  CHECK(r.moment_rhs == doctest::Approx(-oracle::kLambdaStar).epsilon(1e-5));
  CHECK(r.moment_lhs <= r.moment_rhs);
}

TEST_CASE("constant potential shifts value and pairing only") {
  const ProblemSpec s = builtin("ou-quadratic");
  const DualityReport base = duality_check(s, {});
  const DualityReport sh = duality_check(s, CoefficientModel1D::constant_field(0.3));
  CHECK(sh.lambda_star_of_V == doctest::Approx(base.lambda_star_of_V + 0.3).epsilon(1e-8));
  CHECK(sh.pairing == doctest::Approx(base.pairing + 0.3).epsilon(1e-10));
  CHECK(std::abs(sh.gap - base.gap) <= 1e-8);
}

TEST_CASE("attainment on every 1-D linear-quadratic entry") {
  for (const auto& name : builtin_names()) {
    const ProblemSpec s = builtin(name);
    if (!s.is_pde() || !leqg_view(s.pde())) continue;
    CAPTURE(name);
    const DualityReport r = duality_check(s, s.pde().vbar);
    CHECK(r.gap <= 1e-4 + r.truncation_mass);
    CHECK(r.gap >= -1e-6 - r.truncation_mass);
  }
}

TEST_CASE("moment bound on every catalog PDE with bounded perturbations") {
  const std::vector<CoefficientModel1D> vbars{{}, CoefficientModel1D::bump(1.0, 0.0, 1.0),
                                              CoefficientModel1D::bump(-0.5, 1.0, 0.5),
                                              CoefficientModel1D::constant_field(0.2)};
  for (const auto& name : builtin_names()) {
    const ProblemSpec s = builtin(name);
    if (!s.is_pde()) continue;
    for (const auto& v : vbars) {
      CAPTURE(name);
      const DualityReport r = duality_check(s, v);
      CHECK(r.moment_lhs <= r.moment_rhs + 1e-6 + r.truncation_mass);
    }
  }
}

TEST_CASE("weak duality over twelve test measures") {
  const ProblemSpec s = builtin("ou-quadratic");
  for (const auto& vbar : {CoefficientModel1D{}, CoefficientModel1D::bump(1.0, 0.5, 0.8)}) {
    const ProblemSpec sv = with_vbar(s, vbar);
    const LambdaStarResult ls = lambda_star(sv);
    const Grid& g = ls.w_star.grid;
    std::vector<Measure1D> measures;
    for (double m : {-1.0, 0.0, 1.5}) {
      for (double sd : {0.3, 0.7, 1.2}) measures.push_back(gaussian_measure(g, m, sd));
    }
    for (auto [m1, m2] : {std::pair{-1.0, 1.0}, std::pair{0.0, 2.0}, std::pair{-2.0, 0.5}}) {
      measures.push_back(make_measure(sample(g, [m1, m2](double x) {
        return std::exp(-2.0 * (x - m1) * (x - m1)) + 0.5 * std::exp(-(x - m2) * (x - m2));
      })));
    }
    REQUIRE(measures.size() == 12);
    const auto family = default_test_family(sv, g, ls.w_star.W);
    for (const auto& mu : measures) {
      const double pairing = mu.integrate(sample(g, [&vbar](double x) { return eval_coeff(vbar, x); }));
      CHECK(pairing - J_lower(sv, mu, family).value <= ls.lambda_star + 1e-6);
    }
  }
}

TEST_CASE("rate functional vanishes at the computed invariant measure") {
  const ProblemSpec s = builtin("ou-bounded-v");
  const LambdaStarResult ls = lambda_star(s);
  const DriftField d = drift_of(s, ls.w_star);
  const Measure1D mu = invariant_density(d);
  const Grid& g = d.grid;
  std::vector<Field> fam{sample(g, [](double) { return 1.0; }),
                         sample(g, [](double x) { return std::exp(0.1 * x * x); }),
                         sample(g, [](double x) { return 1.0 + 0.5 * std::exp(-x * x); })};
  CHECK(std::abs(rate_functional_lower(d, mu.density, fam)) <= 1e-6);
}

TEST_CASE("perturbation sweep") {
  const ProblemSpec s = builtin("ou-quadratic");
  std::vector<CoefficientModel1D> seq;
  for (int n : {1, 2, 4, 8, 16}) seq.push_back(CoefficientModel1D::bump(1.0 / n, 0.0, 1.0));
  const PerturbationTable t = perturbation_sweep(s, seq);
  REQUIRE(t.rows.size() == 5);
  const int ns[] = {1, 2, 4, 8, 16};
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(t.rows[k].delta <= 1.0 / ns[k]);
    if (k > 0) {
      CHECK(t.rows[k].delta < t.rows[k - 1].delta);
      CHECK(t.rows[k].sup_distance < t.rows[k - 1].sup_distance);
    }
  }

  const PerturbationTable flat = perturbation_sweep(s, std::vector<CoefficientModel1D>(3));
  for (const auto& r : flat.rows) {
    CHECK(r.delta == 0.0);
    CHECK(r.sup_distance == 0.0);
    CHECK(r.lambda == flat.lambda_base);
  }
  CHECK_ERROR_KIND(perturbation_sweep(s, {CoefficientModel1D::monomial(1, 1.0)}), ErrorKind::PreconditionViolation);
}

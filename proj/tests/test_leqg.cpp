#include <cmath>

#include "support.hpp"

#include "ergo/classify.hpp"
#include "ergo/lambdastar.hpp"
#include "ergo/leqg.hpp"

using namespace ergo;

namespace {

Eigen::MatrixXd one(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

}  // namespace

TEST_CASE("1-D Riccati roots") {
  const auto [km, kp] = riccati_roots_1d(-1.0, -1.0, 1.0, 1.0);
  CHECK(km == doctest::Approx(oracle::kKMinus).epsilon(1e-14));
  CHECK(kp == doctest::Approx(oracle::kKPlus).epsilon(1e-14));
  for (double k : {km, kp}) CHECK(std::abs(k * k - 2.0 * k - 1.0) <= 1e-14);

  const auto [z, t] = riccati_roots_1d(-1.0, 0.0, 1.0, 1.0);
  CHECK(z == 0.0);
  CHECK(t == doctest::Approx(2.0));

  CHECK_ERROR_KIND(riccati_roots_1d(0.0, 1.0, 1.0, 1.0), ErrorKind::ComplexRoots);
}

TEST_CASE("1-D roots satisfy the quadratic for non-unit ahat") {
  for (double ahat : {0.25, 0.5, 2.0, 3.0}) {
    for (double D : {-2.0, -0.3, 0.7}) {
      for (double M : {-3.0, -0.5}) {
        const auto [km, kp] = riccati_roots_1d(D, M, 1.0, ahat);
        CHECK(km == doctest::Approx(oracle::k_minus(D, M, ahat)).epsilon(1e-12));
        CHECK(kp == doctest::Approx(oracle::k_plus(D, M, ahat)).epsilon(1e-12));
        CHECK(D + ahat * km < 0.0);
        CHECK(D + ahat * kp > 0.0);
      }
    }
  }
}

TEST_CASE("Hamiltonian solver") {
  const Eigen::MatrixXd K1 = riccati_stabilizing_nd(one(-1.0), one(-1.0), one(1.0));
  CHECK(K1(0, 0) == doctest::Approx(oracle::kKMinus).epsilon(1e-12));

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd K2 = riccati_stabilizing_nd(-I, -I, I);
  CHECK((K2 - oracle::kKMinus * I).cwiseAbs().maxCoeff() <= 1e-12);

  bool rejected = false;
  try {
    const LeqgSolution s = assemble(-I, I, I, I, Eigen::VectorXd::Zero(2));
    rejected = !s.stable;
  } catch (const Error& e) {
    rejected = e.kind() == ErrorKind::NoStabilizing;
  }
  CHECK(rejected);
}

TEST_CASE("coupled systems satisfy the residual invariants") {
  Eigen::MatrixXd D(3, 3), M(3, 3), a(3, 3), ah(3, 3);
  D << -1.0, 0.4, 0.0, 0.2, -0.5, 0.3, -0.1, 0.0, -2.0;
  M << -2.0, 0.3, 0.1, 0.3, -1.0, 0.2, 0.1, 0.2, -1.5;
  a << 1.0, 0.2, 0.0, 0.2, 1.5, 0.1, 0.0, 0.1, 0.8;
  ah = 0.5 * a;
  const Eigen::VectorXd v = Eigen::Vector3d(0.3, -0.2, 1.0);
  const LeqgSolution s = assemble(D, M, a, ah, v);
  CHECK((s.K - s.K.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(s.riccati_residual <= 1e-10);
  CHECK(s.linear_residual <= 1e-10);
  CHECK(s.stable);
  CHECK(s.stability_margin > 0.0);
  CHECK(s.lambda == doctest::Approx(0.5 * (a * s.K).trace() + 0.5 * s.e.dot(ah * s.e)));
}

TEST_CASE("assembled value on the 1-D examples") {
  const LeqgSolution s = assemble(one(-1.0), one(-1.0), one(1.0), one(1.0), Eigen::VectorXd::Zero(1));
  CHECK(s.e(0) == 0.0);
  CHECK(s.lambda == doctest::Approx(oracle::kLambdaStar).epsilon(1e-14));

  const LeqgSolution t = assemble(one(-1.0), one(-1.0), one(1.0), one(1.0), Eigen::VectorXd::Ones(1));
  CHECK(t.e(0) == doctest::Approx(1.0 / oracle::kSqrt2).epsilon(1e-14));
  CHECK(t.lambda == doctest::Approx(oracle::kLambdaStar + 0.25).epsilon(1e-14));
  CHECK((-1.0 + t.K(0, 0)) * t.e(0) + 1.0 == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("decoupled 2-D value is the sum of per-coordinate spectral values") {
  const ProblemSpec two = builtin("leqg-2d");
  const LeqgSolution s = assemble(two.leqg());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < two.leqg().dim(); ++i) sum += lambda_star(project_coordinate(two, i)).lambda_star;
  CHECK(std::abs(s.lambda - sum) <= 1e-5);
}

TEST_CASE("spectral value agrees with the closed form on every 1-D linear-quadratic entry") {
  for (const auto& name : builtin_names()) {
    const ProblemSpec s = builtin(name);
    if (!s.is_pde() || !leqg_view(s.pde())) continue;
    CAPTURE(name);
    CHECK(std::abs(lambda_star(s).lambda_star - leqg_oracle(s.pde())->lambda) <= 1e-5);
  }
}

TEST_CASE("the two branches induce ergodic and transient drifts") {
  const auto [km, kp] = riccati_roots_1d(-1.0, -1.0, 1.0, 1.0);
  const Grid g = make_grid(8.0, 2001);
  CHECK(scale_classify(DriftField::linear(g, -1.0 + km, 1.0), 6.4).verdict == Verdict::Ergodic);
  CHECK(scale_classify(DriftField::linear(g, -1.0 + kp, 1.0), 6.4).verdict == Verdict::Transient);
}

TEST_CASE("singular linear solve is reported") {
  Eigen::MatrixXd K = one(1.0);
  CHECK_ERROR_KIND(assemble_with(K, one(-1.0), one(-1.0), one(1.0), one(1.0), Eigen::VectorXd::Ones(1)),
                   ErrorKind::SingularLinearSolve);
}

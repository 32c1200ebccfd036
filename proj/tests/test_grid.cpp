#include <cmath>

#include "support.hpp"

#include "ergo/grid.hpp"

using namespace ergo;

TEST_CASE("make_grid") {
  CHECK(make_grid(8.0, 2001).spacing() == doctest::Approx(0.008).epsilon(1e-14));
  CHECK_ERROR_KIND(make_grid(8.0, 4), ErrorKind::BadGrid);
  CHECK_ERROR_KIND(make_grid(8.0, 3), ErrorKind::BadGrid);
  CHECK_ERROR_KIND(make_grid(-1.0, 11), ErrorKind::BadGrid);
  const Grid g = make_grid(1.0, 5);
  const std::vector<double> expect{-1.0, -0.5, 0.0, 0.5, 1.0};
  CHECK(g.nodes() == expect);
  CHECK(g.x(g.center()) == 0.0);
}

TEST_CASE("odd_count_for_spacing") {
  CHECK(odd_count_for_spacing(8.0, 0.008) == 2001);
  CHECK(odd_count_for_spacing(6.0, 0.008) % 2 == 1);
}

TEST_CASE("window keeps the spacing") {
  const Grid g = make_grid(8.0, 2001);
  const Grid w = g.window(2.0);
  CHECK(w.spacing() == doctest::Approx(g.spacing()));
  CHECK(w.radius() == doctest::Approx(2.0));
  CHECK(w.size() == 501);
}

TEST_CASE("resample") {
  const Grid g = make_grid(4.0, 201);
  const Field f = sample(g, [](double x) { return std::sin(x); });
  CHECK(resample(f, g).values == f.values);

  const Field lin = sample(g, [](double x) { return 2.0 * x; });
  const Grid other = make_grid(3.3, 77);
  const Field r = resample(lin, other);
  for (std::size_t i = 0; i < other.size(); ++i) CHECK(r[i] == doctest::Approx(2.0 * other.x(i)).epsilon(1e-13));

  // wider target needs the extrapolation flag; affine extension stays exact
  const Grid wide = make_grid(6.0, 61);
  CHECK_ERROR_KIND(resample(lin, wide), ErrorKind::PreconditionViolation);
  const Field e = resample(lin, wide, true);
  for (std::size_t i = 0; i < wide.size(); ++i) CHECK(e[i] == doctest::Approx(2.0 * wide.x(i)).epsilon(1e-13));

  const Field sq = sample(g, [](double x) { return x * x; });
  const Grid fine = make_grid(4.0, 401);
  const Field q = resample(sq, fine);
  double err = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) err = std::max(err, std::abs(q[i] - fine.x(i) * fine.x(i)));
  CHECK(err <= g.spacing() * g.spacing());
}

TEST_CASE("stencils are exact on quadratics") {
  const Grid g = make_grid(3.0, 31);
  const Field f = sample(g, [](double x) { return x * x; });
  const Field d1 = derivative(f), d2 = second_derivative(f);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(d1[i] == doctest::Approx(2.0 * g.x(i)).epsilon(1e-12));
    CHECK(d2[i] == doctest::Approx(2.0).epsilon(1e-12));
  }
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    CHECK(central_difference(f.values, i, g.spacing()) == doctest::Approx(2.0 * g.x(i)).epsilon(1e-12));
    CHECK(second_difference(f.values, i, g.spacing()) == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("integration, window norms and normalization") {
  const Grid g = make_grid(2.0, 401);
  CHECK(integrate(sample(g, [](double x) { return x * x; })) == doctest::Approx(16.0 / 3.0).epsilon(1e-4));
  CHECK(integrate_window(sample(g, [](double) { return 1.0; }), 1.0) == doctest::Approx(2.0));
  Field f = sample(g, [](double x) { return 3.0 + x; });
  CHECK(sup_norm_window(f, 1.0) == doctest::Approx(4.0));
  CHECK(normalize_at_center(f) == doctest::Approx(3.0));
  CHECK(f[g.center()] == 0.0);
  CHECK(f.at(2.5) == doctest::Approx(2.5));
}

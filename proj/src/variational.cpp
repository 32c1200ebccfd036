#include "ergo/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergo/errors.hpp"

namespace ergo {

double Measure1D::integrate(const Field& f) const {
  const Field g = f.grid.same_nodes(grid) ? f : resample(f, grid);
  std::vector<double> prod(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) prod[i] = g[i] * density[i];
  return ergo::integrate(Field(grid, std::move(prod)));
}

Measure1D make_measure(Field density) {
  for (double v : density.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorKind::PreconditionViolation, "density must be finite and >= 0");
  }
  const double mass = integrate(density);
  if (!(mass > 0.0)) throw Error(ErrorKind::PreconditionViolation, "density has no mass");
  for (auto& v : density.values) v /= mass;
  Measure1D mu;
  mu.grid = density.grid;
  mu.density = std::move(density);
  mu.total_mass = 1.0;
  return mu;
}

Measure1D gaussian_measure(const Grid& grid, double mean, double sd) {
  return make_measure(sample(grid, [=](double x) {
    const double u = (x - mean) / sd;
    return std::exp(-0.5 * u * u);
  }));
}

Field G_functional(const ProblemSpec& spec, const Field& W) {
  const SampledCoefficients c = sample_coefficients(spec.pde(), W.grid);
  const Field d1 = derivative(W);
  const Field d2 = second_derivative(W);
  std::vector<double> g(W.size());
  for (std::size_t i = 0; i < W.size(); ++i) {
    g[i] = 0.5 * (c.a[i] * d2[i] + c.da[i] * d1[i]) + c.b[i] * d1[i] + 0.5 * c.ahat[i] * d1[i] * d1[i] + c.v0[i];
  }
  return Field(W.grid, std::move(g));
}

bool bounded_above_on_grid(const Field& G) {
  const double cut = 0.75 * G.grid.radius();
  double inner = -std::numeric_limits<double>::infinity();
  double outer = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < G.size(); ++i) {
    if (!std::isfinite(G[i])) return false;
    if (std::abs(G.grid.x(i)) < cut) {
      inner = std::max(inner, G[i]);
    } else {
      outer = std::max(outer, G[i]);
    }
  }
  return outer <= inner + 1e-6 * (1.0 + std::abs(inner));
}

JLowerResult J_lower(const ProblemSpec& spec, const Measure1D& mu, const std::vector<TestFunction>& family) {
  JLowerResult res;
  res.value = -std::numeric_limits<double>::infinity();
  for (const auto& t : family) {
    const Field W = t.W.grid.same_nodes(mu.grid) ? t.W : resample(t.W, mu.grid);
    const Field G = G_functional(spec, W);
    if (!bounded_above_on_grid(G)) {
      res.skipped.push_back(t.name);
      continue;
    }
    const double v = -mu.integrate(G);
    ++res.used;
    if (v > res.value) {
      res.value = v;
      res.best = t.name;
    }
  }
  if (res.used == 0) throw Error(ErrorKind::EmptyFamily, "no admissible test function in the family");
  return res;
}

std::vector<TestFunction> default_test_family(const ProblemSpec& spec, const Grid& grid,
                                              const std::optional<Field>& w_star) {
  const Pde1D& p = spec.pde();
  std::vector<TestFunction> fam;
  fam.push_back({"zero", sample(grid, [](double) { return 0.0; })});
  fam.push_back({"+W0", sample(grid, [&p](double x) { return eval_coeff(p.w0, x); })});
  fam.push_back({"-W0", sample(grid, [&p](double x) { return -eval_coeff(p.w0, x); })});
  for (int j = 0; j <= 8; ++j) {
    const double K = -1.0 + 0.25 * j;
    fam.push_back({"quadratic K=" + std::to_string(K), sample(grid, [K](double x) { return 0.5 * K * x * x; })});
  }
  for (double A : {0.5, -0.5}) {
    fam.push_back({"bump A=" + std::to_string(A), sample(grid, [A](double x) { return A * std::exp(-0.5 * x * x); })});
  }
  if (w_star) fam.push_back({"W*", w_star->grid.same_nodes(grid) ? *w_star : resample(*w_star, grid)});
  return fam;
}

Measure1D invariant_density(const DriftField& d) {
  const Classification cls = scale_classify(d, 0.8 * d.grid.radius());
  if (cls.verdict != Verdict::Ergodic) {
    throw Error(ErrorKind::NotErgodic, "drift classifies as " + to_string(cls.verdict));
  }
  Measure1D mu = make_measure(speed_density(d));
  // exponential tail beyond each edge: mass ~ p(R) a / (2 |m(R)|) for inward m
  const std::size_t n = d.grid.size();
  auto tail = [&](std::size_t i, double outward_m) {
    if (outward_m < 0.0) return mu.density[i] * d.a[i] / (2.0 * -outward_m);
    return mu.density[i] * d.grid.radius();
  };
  mu.truncation_mass = tail(n - 1, d.m[n - 1]) + tail(0, -d.m[0]);
  return mu;
}

Field adjoint_residual(const DriftField& d, const Field& p) {
  if (!p.grid.same_nodes(d.grid)) throw Error(ErrorKind::PreconditionViolation, "density must live on the drift grid");
  const std::size_t n = d.grid.size();
  const double h = d.grid.spacing();
  std::vector<double> flux(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double D = h * (d.m[i] / d.a[i] + d.m[i + 1] / d.a[i + 1]);
    const double B = (std::abs(D) < 1e-12) ? 1.0 - 0.5 * D : D / std::expm1(D);
    const double ui = d.a[i] * p[i];
    const double uj = d.a[i + 1] * p[i + 1];
    flux[i] = B / (2.0 * h) * (uj - std::exp(D) * ui);
  }
  std::vector<double> r(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) r[i] = (flux[i] - flux[i - 1]) / h;
  return Field(d.grid, std::move(r));
}

DualityReport duality_check(const ProblemSpec& spec, const CoefficientModel1D& vbar,
                            const std::vector<TestFunction>& extra, double tol) {
  if (!vbar.is_bounded()) throw Error(ErrorKind::PreconditionViolation, "vbar must be bounded (no polynomial terms)");
  const ProblemSpec s = with_vbar(spec, vbar);
  DualityReport rep;
  rep.lambda_result = lambda_star(s, tol);
  const GridSolution& ws = rep.lambda_result.w_star;
  rep.lambda_star_of_V = rep.lambda_result.lambda_star;
  const DriftField d = drift_of(s, ws);
  rep.mu_star = invariant_density(d);
  rep.truncation_mass = rep.mu_star.truncation_mass;

  std::vector<TestFunction> family = default_test_family(s, rep.mu_star.grid, ws.W);
  family.insert(family.end(), extra.begin(), extra.end());
  const JLowerResult J = J_lower(s, rep.mu_star, family);
  rep.J_at_mu_star = J.value;
  rep.best_test = J.best;

  const Grid& g = rep.mu_star.grid;
  rep.pairing = rep.mu_star.integrate(sample(g, [&vbar](double x) { return eval_coeff(vbar, x); }));
  rep.gap = rep.lambda_star_of_V - (rep.pairing - rep.J_at_mu_star);
  const Pde1D& p = s.pde();
  rep.moment_lhs = rep.mu_star.integrate(sample(g, [&p](double x) { return u0_at(p, x); }));
  rep.moment_rhs = -rep.lambda_star_of_V + sup_abs(vbar, std::max(12.0, g.radius()));
  return rep;
}

PerturbationTable perturbation_sweep(const ProblemSpec& spec, const std::vector<CoefficientModel1D>& vbar_sequence,
                                     double window, double tol) {
  PerturbationTable tab;
  tab.window = window;
  const LambdaStarResult base = lambda_star(with_vbar(spec, {}), tol);
  tab.lambda_base = base.lambda_star;
  const Grid common = base.w_star.grid.window(window);
  const Field w0 = resample(base.w_star.W, common);
  for (std::size_t k = 0; k < vbar_sequence.size(); ++k) {
    if (!vbar_sequence[k].is_bounded()) {
      throw Error(ErrorKind::PreconditionViolation, "perturbations must be bounded (no polynomial terms)");
    }
    const LambdaStarResult r = lambda_star(with_vbar(spec, vbar_sequence[k]), tol);
    const Field wn = resample(r.w_star.W, common);
    PerturbationRow row;
    row.index = k;
    row.lambda = r.lambda_star;
    row.delta = std::abs(r.lambda_star - tab.lambda_base);
    for (std::size_t i = 0; i < common.size(); ++i) row.sup_distance = std::max(row.sup_distance, std::abs(wn[i] - w0[i]));
    tab.rows.push_back(row);
  }
  return tab;
}

}  // namespace ergo

#include "ergo/lambdastar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergo/classify.hpp"
#include "ergo/errors.hpp"
#include "tridiag.hpp"

namespace ergo {

std::optional<double> kappa_of(const ProblemSpec& spec, double window) {
  const Pde1D& p = spec.pde();
  constexpr std::size_t samples = 4801;
  const double k0 = eval_coeff(p.ahat, 0.0) / eval_coeff(p.a, 0.0);
  if (!(k0 > 0.0)) return std::nullopt;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = -window + 2.0 * window * static_cast<double>(i) / (samples - 1);
    const double a = eval_coeff(p.a, x);
    if (std::abs(eval_coeff(p.ahat, x) - k0 * a) > 1e-12) return std::nullopt;
  }
  return k0;
}

EigenPair principal_eigenvalue(const ProblemSpec& spec, const Grid& grid, double kappa,
                               const std::optional<Field>& warm) {
  if (!(kappa > 0.0)) throw Error(ErrorKind::PreconditionViolation, "kappa must be positive");
  const SampledCoefficients c = sample_coefficients(spec.pde(), grid);
  const std::size_t n = grid.size();
  const std::size_t m = n - 2;
  const double h = grid.spacing();

  // A = 1/2 a d2 + b~ d + kappa V on interior nodes.
  std::vector<double> lo(m), di(m), up(m);
  double gersh = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    lo[k] = 0.5 * c.a[i] / (h * h) - c.btilde[i] / (2.0 * h);
    up[k] = 0.5 * c.a[i] / (h * h) + c.btilde[i] / (2.0 * h);
    di[k] = -c.a[i] / (h * h) + kappa * c.V[i];
    gersh = std::max(gersh, di[k] + std::abs(k > 0 ? lo[k] : 0.0) + std::abs(k + 1 < m ? up[k] : 0.0));
  }

  std::vector<double> x(m, 1.0);
  double sigma = gersh + 0.1;
  if (warm) {
    const Field w = resample(*warm, grid, true);
    for (std::size_t k = 0; k < m; ++k) x[k] = std::max(std::abs(w[k + 1]), 1e-300);
  }
  auto normalize = [](std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    s = std::sqrt(s);
    for (double& e : v) e /= s;
  };
  normalize(x);

  std::vector<double> bl(m), bd(m), bu(m), y(m), prev(m);
  auto build = [&](double s) {
    for (std::size_t k = 0; k < m; ++k) {
      bl[k] = -lo[k];
      bu[k] = -up[k];
      bd[k] = s - di[k];
    }
  };
  build(sigma);

  double lambda = std::numeric_limits<double>::quiet_NaN();
  bool shift_settled = false;
  int it = 0;
  constexpr int max_iter = 5000;
  for (; it < max_iter; ++it) {
    y = x;
    if (!detail::solve_tridiagonal(bl, bd, bu, y)) {
      throw Error(ErrorKind::PerronViolation, "singular shifted operator in inverse iteration");
    }
    double xy = 0.0;
    for (std::size_t k = 0; k < m; ++k) xy += x[k] * y[k];
    const double est = sigma - 1.0 / xy;  // x has unit norm
    prev = x;
    x = y;
    normalize(x);
    if (x[m / 2] < 0.0) {
      for (double& e : x) e = -e;
    }
    double dx = 0.0;
    for (std::size_t k = 0; k < m; ++k) dx = std::max(dx, std::abs(x[k] - prev[k]));
    const double dl = std::abs(est - lambda);
    lambda = est;
    if (!shift_settled && dl < 1e-3) {
      // move the shift close to the estimate once it is reliable
      sigma = lambda + 0.1;
      build(sigma);
      shift_settled = true;
      continue;
    }
    if (shift_settled && dl <= 1e-14 * std::max(1.0, std::abs(lambda)) && dx <= 1e-13) break;
  }
  if (it == max_iter) throw Error(ErrorKind::NotConverged, "inverse iteration did not converge");

  double xmax = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (!(x[k] > 0.0)) {
      throw Error(ErrorKind::PerronViolation,
                  "principal eigenvector changes sign at x = " + std::to_string(grid.x(k + 1)) +
                      "; refine the grid");
    }
    xmax = std::max(xmax, x[k]);
  }
  std::vector<double> phi(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) phi[k + 1] = x[k] / xmax;
  EigenPair ep;
  ep.lambda0 = lambda / kappa;
  ep.phi = Field(grid, std::move(phi));
  ep.iterations = it;
  return ep;
}

double richardson_eigenvalue(const ProblemSpec& spec, const Grid& grid, double kappa, EigenPair* fine,
                             const std::optional<Field>& warm) {
  if ((grid.size() - 1) % 4 != 0) {
    throw Error(ErrorKind::BadGrid, "Richardson extrapolation needs (n - 1) divisible by 4");
  }
  EigenPair f = principal_eigenvalue(spec, grid, kappa, warm);
  const Grid coarse = make_grid(grid.radius(), (grid.size() - 1) / 2 + 1);
  const EigenPair g = principal_eigenvalue(spec, coarse, kappa, f.phi);
  const double value = (4.0 * f.lambda0 - g.lambda0) / 3.0;
  if (fine) *fine = std::move(f);
  return value;
}

std::string to_string(Method m) { return m == Method::Spectral ? "Spectral" : "Bisection"; }

namespace {

// Grid of spacing h whose half-width node count is even.
Grid sweep_grid(double R, double h) {
  auto half = static_cast<std::size_t>(std::llround(R / h));
  if (half % 2 == 1) ++half;
  return make_grid(static_cast<double>(half) * h, 2 * half + 1);
}

double max_interior_abs(const Field& f) {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s = std::max(s, std::abs(f[i]));
  return s;
}

}  // namespace

LambdaStarResult lambda_star(const ProblemSpec& spec, double tol, const LambdaStarOptions& opts) {
  const auto kappa = kappa_of(spec);
  if (!kappa) {
    const auto bracket = automatic_bracket(spec);
    LambdaStarResult r = lambda_star_bisect(spec, bracket, std::max(tol, 1e-3));
    r.note = "ahat not proportional to a; bisection on bracket [" + std::to_string(bracket.first) + ", " +
             std::to_string(bracket.second) + "]. " + r.note;
    return r;
  }
  if (opts.radii.empty()) throw Error(ErrorKind::PreconditionViolation, "empty radius schedule");

  LambdaStarResult res;
  res.kappa = kappa;
  res.method = Method::Spectral;
  EigenPair last;
  Grid last_grid;
  std::optional<Field> warm;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (double R : opts.radii) {
    const Grid g = sweep_grid(R, opts.h);
    EigenPair ep;
    double lam;
    if (opts.richardson) {
      lam = richardson_eigenvalue(spec, g, *kappa, &ep, warm);
    } else {
      ep = principal_eigenvalue(spec, g, *kappa, warm);
      lam = ep.lambda0;
    }
    res.R_trace.emplace_back(g.radius(), lam);
    warm = ep.phi;
    last = std::move(ep);
    last_grid = g;
    if (std::isfinite(prev) && std::abs(lam - prev) <= tol) {
      res.converged = true;
      break;
    }
    prev = lam;
  }
  for (std::size_t i = 1; i < res.R_trace.size(); ++i) {
    if (res.R_trace[i].second < res.R_trace[i - 1].second - 1e-9) res.trace_monotone = false;
  }
  if (!res.converged) {
    throw Error(ErrorKind::NotConverged, "radius schedule exhausted; last two values " +
                                             std::to_string(prev) + ", " + std::to_string(res.R_trace.back().second));
  }
  res.lambda_star = res.R_trace.back().second;

  // W* = log(phi) / kappa on the inner window, away from the phi = 0 ends.
  const Grid inner = last_grid.window(opts.inner_fraction * last_grid.radius());
  const std::size_t off = last_grid.center() - inner.center();
  const double h = last_grid.spacing();
  std::vector<double> w(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) w[i] = std::log(last.phi[off + i]) / *kappa;
  auto logphi = [&](std::size_t j) { return std::log(last.phi[j]) / *kappa; };
  const double slope_left = (logphi(off + 1) - logphi(off - 1)) / (2.0 * h);
  const std::size_t jr = off + inner.size() - 1;
  const double slope_right = (logphi(jr + 1) - logphi(jr - 1)) / (2.0 * h);

  Field raw(inner, std::move(w));
  GridSolution ws;
  ws.grid = inner;
  bool polished = false;
  if (opts.polish) {
    try {
      ws = solve_ergodic_neumann(spec, raw, res.lambda_star, slope_left, slope_right);
      res.polish_lambda = ws.lambda;
      polished = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoConvergence) throw;
      res.note = std::string("polish failed, raw log(phi) kept: ") + e.what();
    }
  }
  if (!polished) {
    ws.W = raw;
    ws.offset = normalize_at_center(ws.W);
    res.polish_lambda = res.lambda_star;
  }
  ws.lambda = res.lambda_star;
  ws.normalized_at = 0.0;
  ws.residual_norm = max_interior_abs(residual(spec, inner, ws.W, res.polish_lambda));
  res.w_star = std::move(ws);
  return res;
}

LambdaStarResult lambda_star_bisect(const ProblemSpec& spec, std::pair<double, double> bracket, double tol,
                                    const NewtonOptions& newton) {
  auto [lo, hi] = bracket;
  if (!(lo < hi)) throw Error(ErrorKind::BadBracket, "bracket must satisfy lo < hi");
  const double R = spec.pde().domain_radius;
  const Grid grid = make_grid(R, odd_count_for_spacing(R, 0.008));

  std::optional<GridSolution> best;
  auto transient_at = [&](double lam) {
    try {
      GridSolution sol = solve_dirichlet(spec, grid, lam, std::nullopt, std::nullopt, newton);
      const Classification cls = classify_solution(spec, sol);
      if (cls.verdict == Verdict::Transient) {
        best = std::move(sol);
        return true;
      }
      return false;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NoConvergence || e.kind() == ErrorKind::Inconclusive) return false;
      throw;
    }
  };
  const bool lo_t = transient_at(lo);
  const bool hi_t = transient_at(hi);
  if (lo_t == hi_t) {
    throw Error(ErrorKind::BadBracket, std::string("both bracket ends classify as ") +
                                           (lo_t ? "Transient" : "non-transient or unsolved"));
  }
  if (lo_t) throw Error(ErrorKind::BadBracket, "lower end is transient while the upper end is not");
  std::optional<GridSolution> at_hi = best;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (transient_at(mid)) {
      hi = mid;
      at_hi = best;
    } else {
      lo = mid;
    }
  }
  LambdaStarResult res;
  res.method = Method::Bisection;
  res.kappa = kappa_of(spec);
  res.heuristic = true;
  res.converged = true;
  res.lambda_star = 0.5 * (lo + hi);
  res.polish_lambda = res.lambda_star;
  res.w_star = *at_hi;
  res.note = "classification flip point (heuristic); W* is the transient solution at the upper end";
  return res;
}

std::pair<double, double> automatic_bracket(const ProblemSpec& spec, double margin) {
  const AssumptionReport rep = validate_assumptions(spec);
  auto proportional = [&](double c) {
    ProblemSpec s = spec;
    s.pde().ahat = s.pde().a.scaled(c);
    return lambda_star(s, 1e-6).lambda_star;
  };
  double lo = proportional(rep.c_low);
  double hi = proportional(rep.c_high);
  if (lo > hi) std::swap(lo, hi);
  return {lo - margin, hi + margin};
}

}  // namespace ergo

#include "ergo/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "ergo/errors.hpp"
#include "tridiag.hpp"

namespace ergo {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Discretization {
  SampledCoefficients c;
  double h;
  double lambda;

  double node_residual(const std::vector<double>& W, std::size_t i) const {
    const double d = (W[i + 1] - W[i - 1]) / (2.0 * h);
    const double d2 = (W[i + 1] - 2.0 * W[i] + W[i - 1]) / (h * h);
    return 0.5 * c.a[i] * d2 + 0.5 * c.ahat[i] * d * d + c.btilde[i] * d + c.V[i] - lambda;
  }

  // Componentwise round-off level of node_residual at W.
  double node_floor(const std::vector<double>& W, std::size_t i) const {
    const double d = (W[i + 1] - W[i - 1]) / (2.0 * h);
    const double g = std::abs(c.ahat[i] * d + c.btilde[i]) / (2.0 * h);
    return (0.5 * c.a[i] / (h * h) + g) * (std::abs(W[i + 1]) + std::abs(W[i - 1])) +
           c.a[i] * std::abs(W[i]) / (h * h) + 0.5 * c.ahat[i] * d * d + std::abs(c.V[i]) + std::abs(lambda);
  }
};

struct StageResult {
  bool ok = false;
  int iterations = 0;
  double residual_norm = 0.0;
};

double max_residual(const Discretization& disc, const std::vector<double>& W, std::size_t lo, std::size_t hi) {
  double nr = 0.0;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const double r = disc.node_residual(W, i);
    if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
    nr = std::max(nr, std::abs(r));
  }
  return nr;
}

double roundoff_floor(const Discretization& disc, const std::vector<double>& W, std::size_t lo, std::size_t hi) {
  double f = 0.0;
  for (std::size_t i = lo + 1; i < hi; ++i) f = std::max(f, disc.node_floor(W, i));
  return 8.0 * kEps * f;
}

// Damped Newton on nodes lo+1 .. hi-1 with W[lo], W[hi] held fixed.
StageResult newton_stage(const Discretization& disc, std::size_t lo, std::size_t hi, std::vector<double>& W,
                         const NewtonOptions& o) {
  const double h = disc.h;
  const std::size_t m = hi - lo - 1;
  std::vector<double> sub(m), diag(m), sup(m), rhs(m), trial(W.size());
  StageResult res;
  double nr = max_residual(disc, W, lo, hi);
  for (int it = 0; it <= o.max_iter; ++it) {
    res.iterations = it;
    res.residual_norm = nr;
    if (!std::isfinite(nr)) return res;
    if (nr <= std::max(o.tol, roundoff_floor(disc, W, lo, hi))) {
      res.ok = true;
      return res;
    }
    if (it == o.max_iter) break;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = lo + 1 + k;
      const double d = (W[i + 1] - W[i - 1]) / (2.0 * h);
      const double g = (disc.c.ahat[i] * d + disc.c.btilde[i]) / (2.0 * h);
      const double s = 0.5 * disc.c.a[i] / (h * h);
      sub[k] = s - g;
      sup[k] = s + g;
      diag[k] = -disc.c.a[i] / (h * h);
      rhs[k] = -disc.node_residual(W, i);
    }
    if (!detail::solve_tridiagonal(sub, diag, sup, rhs)) return res;
    double t = 1.0;
    bool accepted = false;
    double trial_nr = 0.0;
    while (t >= o.min_step) {
      trial = W;
      for (std::size_t k = 0; k < m; ++k) trial[lo + 1 + k] += t * rhs[k];
      trial_nr = max_residual(disc, trial, lo, hi);
      if (std::isfinite(trial_nr) && trial_nr <= (1.0 - 1e-4 * t) * nr) {
        accepted = true;
        break;
      }
      t *= o.armijo_factor;
    }
    if (!accepted) return res;
    W.swap(trial);
    nr = trial_nr;
  }
  return res;
}

// Least-squares quadratic through (xs, ys), returned as a callable.
struct Quadratic {
  double x0 = 0, c0 = 0, c1 = 0, c2 = 0;
  double operator()(double x) const {
    const double u = x - x0;
    return c0 + u * (c1 + u * c2);
  }
};

Quadratic fit_quadratic(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Quadratic q;
  q.x0 = xs[xs.size() / 2];
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double u = xs[static_cast<std::size_t>(k)] - q.x0;
    A(k, 0) = 1.0;
    A(k, 1) = u;
    A(k, 2) = u * u;
    y(k) = ys[static_cast<std::size_t>(k)];
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
  q.c0 = c(0);
  q.c1 = c(1);
  q.c2 = c(2);
  return q;
}

// Extends the window solution on [c-k, c+k] to [c-k2, c+k2] by per-side
// quadratic tails and shifts it affinely onto the boundary data.
void extend_window(const Grid& grid, std::vector<double>& W, const std::vector<double>& bnd, std::size_t c,
                   std::size_t k, std::size_t k2) {
  const std::size_t width = 2 * k + 1;
  const std::size_t tail = std::max<std::size_t>(5, width / 10);
  std::vector<double> xs(tail), ys(tail);
  for (std::size_t j = 0; j < tail; ++j) {
    xs[j] = grid.x(c - k + j);
    ys[j] = W[c - k + j];
  }
  const Quadratic left = fit_quadratic(xs, ys);
  for (std::size_t j = 0; j < tail; ++j) {
    xs[j] = grid.x(c + k - j);
    ys[j] = W[c + k - j];
  }
  const Quadratic right = fit_quadratic(xs, ys);
  for (std::size_t i = c - k2; i < c - k; ++i) W[i] = left(grid.x(i));
  for (std::size_t i = c + k + 1; i <= c + k2; ++i) W[i] = right(grid.x(i));
  const std::size_t lo = c - k2, hi = c + k2;
  const double dl = bnd[lo] - W[lo];
  const double dr = bnd[hi] - W[hi];
  const double span = grid.x(hi) - grid.x(lo);
  for (std::size_t i = lo; i <= hi; ++i) W[i] += dl + (dr - dl) * (grid.x(i) - grid.x(lo)) / span;
}

// Adds the affine function taking W[lo], W[hi] onto the data there.
void match_ends(std::vector<double>& W, const std::vector<double>& bnd, std::size_t lo, std::size_t hi) {
  const double dl = bnd[lo] - W[lo], dr = bnd[hi] - W[hi];
  const auto span = static_cast<double>(hi - lo);
  for (std::size_t i = lo; i <= hi; ++i) W[i] += dl + (dr - dl) * static_cast<double>(i - lo) / span;
}

GridSolution finish(const Grid& grid, std::vector<double> W, double lambda, double nr, int iterations) {
  GridSolution sol;
  sol.grid = grid;
  sol.W = Field(grid, std::move(W));
  sol.offset = normalize_at_center(sol.W);
  sol.normalized_at = 0.0;
  sol.lambda = lambda;
  sol.residual_norm = nr;
  sol.iterations = iterations;
  return sol;
}

void require_same_grid(const Grid& grid, const Field& f, const char* what) {
  if (!grid.same_nodes(f.grid)) {
    throw Error(ErrorKind::PreconditionViolation, std::string(what) + " must live on the solve grid");
  }
}

}  // namespace

Field residual(const ProblemSpec& spec, const Grid& grid, const Field& W, double lambda) {
  require_same_grid(grid, W, "W");
  const Discretization disc{sample_coefficients(spec.pde(), grid), grid.spacing(), lambda};
  std::vector<double> r(grid.size(), 0.0);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) r[i] = disc.node_residual(W.values, i);
  return Field(grid, std::move(r));
}

GridSolution solve_dirichlet(const ProblemSpec& spec, const Grid& grid, double lambda,
                             const std::optional<Field>& boundary, const std::optional<Field>& init,
                             const NewtonOptions& opts) {
  const Pde1D& p = spec.pde();
  const Field bnd = boundary ? *boundary : sample(grid, [&p](double x) { return eval_coeff(p.w0, x); });
  const Field start = init ? *init : sample(grid, [&p](double x) { return eval_coeff(p.w0, x); });
  require_same_grid(grid, bnd, "boundary");
  require_same_grid(grid, start, "init");

  const Discretization disc{sample_coefficients(p, grid), grid.spacing(), lambda};
  const std::size_t n = grid.size();
  const std::size_t c = grid.center();

  // a constant offset in `init` cancels in the affine match
  std::vector<double> W = start.values;
  match_ends(W, bnd.values, 0, n - 1);
  const StageResult direct = newton_stage(disc, 0, n - 1, W, opts);
  int total = direct.iterations;
  if (direct.ok) return finish(grid, std::move(W), lambda, direct.residual_norm, total);

  if (!opts.continuation) {
    throw Error(ErrorKind::NoConvergence, "Newton stalled at residual " + std::to_string(direct.residual_norm) +
                                              " (lambda = " + std::to_string(lambda) + ")");
  }

  // Domain-growth continuation: windows [c-k, c+k] growing to the full grid.
  const double h = grid.spacing();
  std::size_t k = std::min(c, std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(opts.continuation_start / h))));
  const auto base_step = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(opts.continuation_step / h)));
  const std::size_t min_step = std::max<std::size_t>(1, base_step / 32);

  W = start.values;
  match_ends(W, bnd.values, c - k, c + k);
  StageResult st = newton_stage(disc, c - k, c + k, W, opts);
  total += st.iterations;
  if (!st.ok) {
    throw Error(ErrorKind::NoConvergence, "continuation failed on the initial window |x| <= " +
                                              std::to_string(grid.x(c + k)) + " (lambda = " + std::to_string(lambda) + ")");
  }
  std::size_t step = base_step;
  while (k < c) {
    const std::size_t k2 = std::min(c, k + step);
    std::vector<double> trial = W;
    extend_window(grid, trial, bnd.values, c, k, k2);
    st = newton_stage(disc, c - k2, c + k2, trial, opts);
    total += st.iterations;
    if (st.ok) {
      W.swap(trial);
      k = k2;
      step = std::min(base_step, 2 * step);
      continue;
    }
    if (step <= min_step) {
      throw Error(ErrorKind::NoConvergence, "continuation stalled near |x| = " + std::to_string(grid.x(c + k2)) +
                                                " (lambda = " + std::to_string(lambda) + ", residual " +
                                                std::to_string(st.residual_norm) + ")");
    }
    step = std::max(min_step, step / 2);
  }
  return finish(grid, std::move(W), lambda, st.residual_norm, total);
}

GridSolution solve_ergodic_neumann(const ProblemSpec& spec, const Field& init, double lambda_init,
                                   double slope_left, double slope_right, const NewtonOptions& opts) {
  const Grid& grid = init.grid;
  const std::size_t n = grid.size();
  const std::size_t c = grid.center();
  const double h = grid.spacing();
  const SampledCoefficients cf = sample_coefficients(spec.pde(), grid);

  std::vector<double> W = init.values;
  const double shift = W[c];
  for (auto& w : W) w -= shift;
  double lambda = lambda_init;

  // Residual at every node; the end nodes use ghost values carrying the slopes.
  auto eval = [&](const std::vector<double>& w, double lam, std::vector<double>& r) {
    double nr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d, d2;
      if (i == 0) {
        d = slope_left;
        d2 = 2.0 * (w[1] - w[0] - h * slope_left) / (h * h);
      } else if (i == n - 1) {
        d = slope_right;
        d2 = 2.0 * (w[n - 2] - w[n - 1] + h * slope_right) / (h * h);
      } else {
        d = (w[i + 1] - w[i - 1]) / (2.0 * h);
        d2 = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h);
      }
      r[i] = 0.5 * cf.a[i] * d2 + 0.5 * cf.ahat[i] * d * d + cf.btilde[i] * d + cf.V[i] - lam;
      if (!std::isfinite(r[i])) return std::numeric_limits<double>::infinity();
      nr = std::max(nr, std::abs(r[i]));
    }
    return nr;
  };
  auto floor_of = [&](const std::vector<double>& w, double lam) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double wl = (i == 0) ? w[1] : w[i - 1];
      const double wr = (i == n - 1) ? w[n - 2] : w[i + 1];
      const double d = (i == 0) ? slope_left : (i == n - 1) ? slope_right : (wr - wl) / (2.0 * h);
      const double g = std::abs(cf.ahat[i] * d + cf.btilde[i]) / (2.0 * h);
      f = std::max(f, (0.5 * cf.a[i] / (h * h) + g) * (std::abs(wl) + std::abs(wr)) + cf.a[i] * std::abs(w[i]) / (h * h) +
                          0.5 * cf.ahat[i] * d * d + std::abs(cf.V[i]) + std::abs(lam) + std::abs(d) / h);
    }
    return 8.0 * kEps * f;
  };
  auto col = [c](std::size_t j) { return static_cast<int>(j < c ? j : j - 1); };
  const int lambda_col = static_cast<int>(n - 1);

  std::vector<double> r(n), rt(n);
  double nr = eval(W, lambda, r);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;
  int it = 0;
  for (;; ++it) {
    if (!std::isfinite(nr)) break;
    if (nr <= std::max(opts.tol, floor_of(W, lambda))) {
      GridSolution sol;
      sol.grid = grid;
      sol.W = Field(grid, W);
      sol.offset = shift;
      sol.lambda = lambda;
      sol.residual_norm = nr;
      sol.iterations = it;
      return sol;
    }
    if (it == opts.max_iter) break;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(4 * n);
    auto put = [&](std::size_t row, std::size_t j, double v) {
      if (j != c) trip.emplace_back(static_cast<int>(row), col(j), v);
    };
    for (std::size_t i = 0; i < n; ++i) {
      const double a2 = cf.a[i] / (h * h);
      if (i == 0) {
        put(i, 0, -a2);
        put(i, 1, a2);
      } else if (i == n - 1) {
        put(i, n - 1, -a2);
        put(i, n - 2, a2);
      } else {
        const double d = (W[i + 1] - W[i - 1]) / (2.0 * h);
        const double g = (cf.ahat[i] * d + cf.btilde[i]) / (2.0 * h);
        put(i, i - 1, 0.5 * a2 - g);
        put(i, i, -a2);
        put(i, i + 1, 0.5 * a2 + g);
      }
      trip.emplace_back(static_cast<int>(i), lambda_col, -1.0);
    }
    Eigen::SparseMatrix<double> J(static_cast<int>(n), static_cast<int>(n));
    J.setFromTriplets(trip.begin(), trip.end());
    J.makeCompressed();
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success) break;
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = -r[i];
    const Eigen::VectorXd dz = lu.solve(rhs);
    if (lu.info() != Eigen::Success) break;

    double t = 1.0;
    bool accepted = false;
    std::vector<double> Wt(n);
    double lt = lambda, ntr = 0.0;
    while (t >= opts.min_step) {
      for (std::size_t j = 0; j < n; ++j) Wt[j] = (j == c) ? 0.0 : W[j] + t * dz(col(j));
      lt = lambda + t * dz(lambda_col);
      ntr = eval(Wt, lt, rt);
      if (std::isfinite(ntr) && ntr <= (1.0 - 1e-4 * t) * nr) {
        accepted = true;
        break;
      }
      t *= opts.armijo_factor;
    }
    if (!accepted) break;
    W.swap(Wt);
    lambda = lt;
    r.swap(rt);
    nr = ntr;
  }
  throw Error(ErrorKind::NoConvergence,
              "ergodic Neumann solve stalled at residual " + std::to_string(nr) + " after " + std::to_string(it) +
                  " iterations");
}

GradientSweep gradient_bound_sweep(const ProblemSpec& spec, double lambda, double r,
                                   const std::vector<double>& R_list, double h, const NewtonOptions& opts) {
  if (R_list.empty()) throw Error(ErrorKind::PreconditionViolation, "empty radius list");
  for (double R : R_list) {
    if (!(R >= 2.0 * r)) {
      throw Error(ErrorKind::PreconditionViolation,
                  "every R must be at least 2r (R = " + std::to_string(R) + ", r = " + std::to_string(r) + ")");
    }
  }
  GradientSweep sw;
  sw.lambda = lambda;
  sw.r = r;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
  for (double R : R_list) {
    const Grid g = make_grid(R, odd_count_for_spacing(R, h));
    const GridSolution sol = solve_dirichlet(spec, g, lambda, std::nullopt, std::nullopt, opts);
    const double s = sup_norm_window(derivative(sol.W), r);
    sw.rows.push_back({R, s});
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    sum += s;
  }
  sw.mean = sum / static_cast<double>(R_list.size());
  sw.spread = hi - lo;
  sw.relative_spread = sw.mean > 0.0 ? sw.spread / sw.mean : 0.0;
  return sw;
}

AffineBound fit_affine_bound(const std::vector<double>& lambdas, const std::vector<double>& sup_values) {
  if (lambdas.size() != sup_values.size() || lambdas.empty()) {
    throw Error(ErrorKind::PreconditionViolation, "affine fit needs matching, non-empty inputs");
  }
  const auto n = static_cast<double>(lambdas.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    mx += lambdas[i] / n;
    my += sup_values[i] * sup_values[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    sxy += (lambdas[i] - mx) * (sup_values[i] * sup_values[i] - my);
    sxx += (lambdas[i] - mx) * (lambdas[i] - mx);
  }
  AffineBound fit;
  fit.C = (sxx > 0.0) ? std::max(0.0, sxy / sxx) : 0.0;
  fit.C_r = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    fit.C_r = std::max(fit.C_r, sup_values[i] * sup_values[i] - fit.C * lambdas[i]);
  }
  fit.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    fit.max_violation =
        std::max(fit.max_violation, sup_values[i] * sup_values[i] - (fit.C_r + fit.C * lambdas[i]));
  }
  return fit;
}

}  // namespace ergo

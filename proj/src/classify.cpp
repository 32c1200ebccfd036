#include "ergo/classify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "ergo/errors.hpp"

namespace ergo {

double TailModel::eval(double x) const {
  double s = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) s = s * x + coeffs[k];
  return s;
}

int TailModel::leading_degree(double zero_tol) const {
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    if (std::abs(coeffs[k]) > zero_tol) return static_cast<int>(k);
  }
  return -1;
}

double DriftField::drift(double x) const {
  const double R = grid.radius();
  if (x > R) return m[m.size() - 1] + right.eval(x) - right.eval(R);
  if (x < -R) return m[0] + left.eval(x) - left.eval(-R);
  return m.at(x);
}

double DriftField::diffusion(double x) const {
  const double R = grid.radius();
  if (x > R) return right.a;
  if (x < -R) return left.a;
  return a.at(x);
}

DriftField DriftField::polynomial(const Grid& grid, std::vector<double> coeffs, double a) {
  DriftField d;
  d.grid = grid;
  TailModel t{std::move(coeffs), a};
  d.m = sample(grid, [&t](double x) { return t.eval(x); });
  d.a = sample(grid, [a](double) { return a; });
  d.left = t;
  d.right = t;
  return d;
}

namespace {

// W ~ q x^2 + p x + r by least squares over the given nodes.
std::pair<double, double> fit_tail_quadratic(const Field& W, std::size_t from, std::size_t to) {
  const auto n = static_cast<Eigen::Index>(to - from);
  const double x0 = W.grid.x((from + to) / 2);
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::size_t i = from + static_cast<std::size_t>(k);
    const double u = W.grid.x(i) - x0;
    A(k, 0) = 1.0;
    A(k, 1) = u;
    A(k, 2) = u * u;
    y(k) = W[i];
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
  return {c(2), c(1) - 2.0 * c(2) * x0};
}

double log_integral(const std::vector<double>& g, std::size_t from, std::size_t to, double h) {
  // log of the trapezoid integral of exp(g) over nodes from..to
  double gmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = from; i <= to; ++i) gmax = std::max(gmax, g[i]);
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s += 0.5 * h * (std::exp(g[i] - gmax) + std::exp(g[i + 1] - gmax));
  return gmax + std::log(s);
}

// Cumulative trapezoid integral of 2m/a from the center node.
std::vector<double> cumulative_2m_over_a(const DriftField& d) {
  const std::size_t n = d.grid.size();
  const std::size_t c = d.grid.center();
  const double h = d.grid.spacing();
  std::vector<double> f(n), I(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) f[i] = 2.0 * d.m[i] / d.a[i];
  for (std::size_t i = c; i + 1 < n; ++i) I[i + 1] = I[i] + 0.5 * h * (f[i] + f[i + 1]);
  for (std::size_t i = c; i > 0; --i) I[i - 1] = I[i] - 0.5 * h * (f[i] + f[i - 1]);
  return I;
}

}  // namespace

DriftField drift_of(const ProblemSpec& spec, const GridSolution& sol) {
  const Pde1D& p = spec.pde();
  const Grid& g = sol.grid;
  const SampledCoefficients c = sample_coefficients(p, g);
  const Field dW = derivative(sol.W);
  DriftField d;
  d.grid = g;
  std::vector<double> m(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) m[i] = c.btilde[i] + c.ahat[i] * dW[i];
  d.m = Field(g, std::move(m));
  d.a = Field(g, c.a);

  const std::size_t n = g.size();
  const std::size_t tail = std::max<std::size_t>(5, n / 10);
  std::vector<double> base(5, 0.0);
  for (int k = 0; k <= 4; ++k) base[static_cast<std::size_t>(k)] = p.b.poly_coeff(k);
  const double ahat_inf = p.ahat.constant;
  auto side = [&](std::size_t from, std::size_t to) {
    const auto [q, lin] = fit_tail_quadratic(sol.W, from, to);
    TailModel t{base, p.a.constant};
    t.coeffs[1] += ahat_inf * 2.0 * q;
    t.coeffs[0] += ahat_inf * lin;
    return t;
  };
  d.left = side(0, tail);
  d.right = side(n - tail, n);
  d.extrapolated = !leqg_view(p).has_value();
  return d;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Ergodic: return "Ergodic";
    case Verdict::NullRecurrent: return "NullRecurrent";
    case Verdict::Transient: return "Transient";
  }
  return "Unknown";
}

std::string to_string(ScaleBehavior s) { return s == ScaleBehavior::Diverges ? "Diverges" : "Converges"; }

Field speed_density(const DriftField& d) {
  const std::vector<double> I = cumulative_2m_over_a(d);
  const std::size_t n = d.grid.size();
  std::vector<double> g(n);
  double gmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::log(2.0 / d.a[i]) + I[i];
    gmax = std::max(gmax, g[i]);
  }
  for (auto& v : g) v = std::exp(v - gmax);
  Field p(d.grid, std::move(g));
  const double mass = integrate(p);
  for (auto& v : p.values) v /= mass;
  return p;
}

Classification scale_classify(const DriftField& d, double probe_radius) {
  if (!(probe_radius > 0.0) || probe_radius > d.grid.radius() + 1e-12) {
    throw Error(ErrorKind::PreconditionViolation, "probe radius must lie in (0, grid radius]");
  }
  const std::size_t c = d.grid.center();
  const double h = d.grid.spacing();
  const auto k_r = static_cast<std::size_t>(std::floor(probe_radius / h + 1e-9));
  const std::size_t k_half = k_r / 2;
  if (k_half < 2) throw Error(ErrorKind::PreconditionViolation, "probe radius too small for the grid");

  const std::vector<double> I = cumulative_2m_over_a(d);
  const std::size_t n = d.grid.size();
  std::vector<double> log_scale(n), log_speed(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_scale[i] = -I[i];
    log_speed[i] = std::log(2.0 / d.a[i]) + I[i];
  }

  Classification cls;
  cls.probe_radius = probe_radius;
  auto evidence = [&](bool right_side) {
    SideEvidence e;
    const std::size_t mid = right_side ? c + k_half : c - k_half;
    const std::size_t end = right_side ? c + k_r : c - k_r;
    const std::size_t a0 = std::min(c, mid), a1 = std::max(c, mid);
    const std::size_t b0 = std::min(mid, end), b1 = std::max(mid, end);
    e.scale_inner = log_integral(log_scale, a0, a1, h);
    e.scale_outer = log_integral(log_scale, b0, b1, h);
    e.speed_inner = log_integral(log_speed, a0, a1, h);
    e.speed_outer = log_integral(log_speed, b0, b1, h);
    e.numeric_scale_diverges = e.scale_outer >= std::log(0.5) + e.scale_inner;
    e.numeric_speed_finite = e.speed_outer < std::log(0.5) + e.speed_inner;
    // stored as actual integrals for reporting
    e.scale_inner = std::exp(e.scale_inner);
    e.scale_outer = std::exp(e.scale_outer);
    e.speed_inner = std::exp(e.speed_inner);
    e.speed_outer = std::exp(e.speed_outer);

    const TailModel& t = right_side ? d.right : d.left;
    const int k = t.leading_degree();
    if (k < 0) {
      e.tail = "neutral";
    } else {
      const double lead = t.coeffs[static_cast<std::size_t>(k)];
      // sign of m as x -> +inf (right) or -inf (left)
      const double sign_at_inf = right_side ? lead : ((k % 2 == 0) ? lead : -lead);
      const bool outward = right_side ? sign_at_inf > 0.0 : sign_at_inf < 0.0;
      e.tail = outward ? "outward" : "inward";
    }
    e.analytic_scale_diverges = e.tail != "outward";
    e.analytic_speed_finite = e.tail == "inward";
    return e;
  };
  cls.left = evidence(false);
  cls.right = evidence(true);
  for (const SideEvidence* e : {&cls.left, &cls.right}) {
    if (e->numeric_scale_diverges != e->analytic_scale_diverges || e->numeric_speed_finite != e->analytic_speed_finite) {
      throw Error(ErrorKind::Inconclusive, std::string(e == &cls.left ? "left" : "right") + " tail is " + e->tail +
                                               " but the numeric scale/speed growth on the probe window disagrees");
    }
  }
  cls.scale_left = cls.left.analytic_scale_diverges ? ScaleBehavior::Diverges : ScaleBehavior::Converges;
  cls.scale_right = cls.right.analytic_scale_diverges ? ScaleBehavior::Diverges : ScaleBehavior::Converges;
  const bool both_diverge = cls.scale_left == ScaleBehavior::Diverges && cls.scale_right == ScaleBehavior::Diverges;
  const bool speed_finite = cls.left.analytic_speed_finite && cls.right.analytic_speed_finite;
  if (speed_finite) {
    cls.speed_mass = std::exp(log_integral(log_speed, c - k_r, c + k_r, h));
  }
  if (both_diverge && speed_finite) {
    cls.verdict = Verdict::Ergodic;
    cls.invariant_density = speed_density(d);
  } else if (both_diverge) {
    cls.verdict = Verdict::NullRecurrent;
  } else {
    cls.verdict = Verdict::Transient;
  }
  return cls;
}

Classification classify_solution(const ProblemSpec& spec, const GridSolution& sol) {
  return scale_classify(drift_of(spec, sol), 0.8 * sol.grid.radius());
}

namespace {

std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

SimulationReport simulate_em(const DriftField& d, double x0, double T, double dt, std::size_t n_paths,
                             std::uint64_t seed, const SimulationOptions& opts) {
  if (!(T > 0.0) || !(dt > 0.0) || n_paths == 0 || opts.record_points < 2 || !(opts.bin_width > 0.0)) {
    throw Error(ErrorKind::PreconditionViolation, "simulation needs T > 0, dt > 0, paths > 0");
  }
  const double R = d.grid.radius();
  const double kill = opts.kill_factor * R;
  const double exit_r = opts.exit_radius > 0.0 ? opts.exit_radius : R;
  const double hist_r = opts.histogram_radius > 0.0 ? opts.histogram_radius : R;
  const double bw = opts.bin_width;
  const auto half = static_cast<std::size_t>(std::max(2.0, std::round(hist_r / bw - 0.5)));
  const std::size_t nbins = 2 * half + 1;
  const double hist_lo = -(static_cast<double>(half) + 0.5) * bw;
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  const std::size_t nrec = opts.record_points;

  std::vector<std::size_t> rec_step(nrec);
  for (std::size_t j = 0; j < nrec; ++j) rec_step[j] = (steps * j) / (nrec - 1);

  std::vector<std::uint64_t> counts(nbins, 0);
  std::uint64_t samples = 0;
  std::vector<double> mean_sum(nrec, 0.0);
  std::vector<std::size_t> exit_count(nrec, 0);
  std::size_t killed = 0;
  const double sqdt = std::sqrt(dt);

  for (std::size_t p = 0; p < n_paths; ++p) {
    auto rng = path_rng(seed, p);
    std::normal_distribution<double> normal(0.0, 1.0);
    double x = x0;
    bool dead = false;
    std::size_t last_inside = 0;
    bool ever_inside = std::abs(x0) <= exit_r;
    std::size_t next_rec = 0;
    if (rec_step[0] == 0) {
      mean_sum[0] += x;
      next_rec = 1;
    }
    for (std::size_t s = 1; s <= steps; ++s) {
      if (!dead) {
        const double z = normal(rng);
        x += d.drift(x) * dt + std::sqrt(d.diffusion(x)) * sqdt * z;
        if (!std::isfinite(x) || std::abs(x) > kill) {
          dead = true;
          ++killed;
        } else {
          ++samples;
          const double u = (x - hist_lo) / bw;
          if (u >= 0.0 && u < static_cast<double>(nbins)) ++counts[static_cast<std::size_t>(u)];
          if (std::abs(x) <= exit_r) {
            last_inside = s;
            ever_inside = true;
          }
        }
      }
      while (next_rec < nrec && rec_step[next_rec] == s) {
        mean_sum[next_rec] += x;
        ++next_rec;
      }
    }
    const bool outside_at_end = dead || std::abs(x) > exit_r;
    if (outside_at_end) {
      // outside on (last_inside, T]; a path never inside counts from t = 0
      for (std::size_t j = 0; j < nrec; ++j) {
        if (!ever_inside || rec_step[j] > last_inside) ++exit_count[j];
      }
    }
  }

  SimulationReport rep;
  rep.n_paths = n_paths;
  rep.dt = dt;
  rep.T = T;
  rep.seed = seed;
  rep.x0 = x0;
  rep.exit_radius = exit_r;
  rep.killed = killed;
  rep.bin_width = bw;
  for (std::size_t j = 0; j < nrec; ++j) {
    rep.times.push_back(static_cast<double>(rec_step[j]) * dt);
    rep.exit_fraction.push_back(static_cast<double>(exit_count[j]) / static_cast<double>(n_paths));
    rep.mean_path.push_back(mean_sum[j] / static_cast<double>(n_paths));
  }
  const Grid bins = make_grid(static_cast<double>(half) * bw, nbins);
  std::vector<double> dens(nbins, 0.0);
  double inside = 0.0;
  for (std::size_t k = 0; k < nbins; ++k) {
    dens[k] = samples ? static_cast<double>(counts[k]) / (static_cast<double>(samples) * bw) : 0.0;
    inside += dens[k] * bw;
  }
  rep.occupation = Field(bins, std::move(dens));
  rep.inside_fraction = inside;
  return rep;
}

DecayFit decay_rate_drift(const DriftField& d, std::pair<double, double> support, double x0,
                          const std::vector<double>& T_grid, std::size_t n_paths, double dt, std::uint64_t seed) {
  if (T_grid.empty() || n_paths == 0 || !(dt > 0.0)) {
    throw Error(ErrorKind::PreconditionViolation, "decay fit needs times, paths and dt > 0");
  }
  std::vector<double> times = T_grid;
  std::sort(times.begin(), times.end());
  std::vector<std::size_t> at_step(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) at_step[j] = static_cast<std::size_t>(std::llround(times[j] / dt));
  const std::size_t steps = at_step.back();
  const double kill = 4.0 * d.grid.radius();
  const double sqdt = std::sqrt(dt);
  std::vector<std::size_t> hits(times.size(), 0);

  for (std::size_t p = 0; p < n_paths; ++p) {
    auto rng = path_rng(seed, p);
    std::normal_distribution<double> normal(0.0, 1.0);
    double x = x0;
    std::size_t j = 0;
    while (j < at_step.size() && at_step[j] == 0) {
      if (x >= support.first && x <= support.second) ++hits[j];
      ++j;
    }
    for (std::size_t s = 1; s <= steps && j < at_step.size(); ++s) {
      x += d.drift(x) * dt + std::sqrt(d.diffusion(x)) * sqdt * normal(rng);
      if (!std::isfinite(x) || std::abs(x) > kill) break;
      while (j < at_step.size() && at_step[j] == s) {
        if (x >= support.first && x <= support.second) ++hits[j];
        ++j;
      }
    }
  }

  DecayFit fit;
  const auto N = static_cast<double>(n_paths);
  double sw = 0, swt = 0, swy = 0, swtt = 0, swty = 0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    DecayPoint pt;
    pt.t = times[j];
    pt.hits = hits[j];
    pt.estimate = static_cast<double>(hits[j]) / N;
    pt.stderr_ = std::sqrt(pt.estimate * (1.0 - pt.estimate) / N);
    fit.points.push_back(pt);
    if (hits[j] < 10) continue;
    // var(log p_hat) ~ (1 - p) / (N p)
    const double w = pt.estimate < 1.0 ? N * pt.estimate / (1.0 - pt.estimate) : N;
    const double y = std::log(pt.estimate);
    sw += w;
    swt += w * pt.t;
    swy += w * y;
    swtt += w * pt.t * pt.t;
    swty += w * pt.t * y;
    ++fit.fitted_points;
  }
  if (fit.fitted_points < 2) {
    throw Error(ErrorKind::InsufficientMass, "fewer than two time points with at least 10 hits in the support");
  }
  const double den = sw * swtt - swt * swt;
  fit.rho = -(sw * swty - swt * swy) / den;
  return fit;
}

DecayFit decay_rate(const ProblemSpec& spec, const GridSolution& sol, double lambda_star,
                    std::pair<double, double> support, double x0, const std::vector<double>& T_grid,
                    std::size_t n_paths, double dt, std::uint64_t seed) {
  if (sol.lambda < lambda_star - 1e-12) {
    throw Error(ErrorKind::PreconditionViolation, "decay check needs lambda >= lambda*");
  }
  DecayFit fit = decay_rate_drift(drift_of(spec, sol), support, x0, T_grid, n_paths, dt, seed);
  fit.lambda = sol.lambda;
  fit.lambda_star = lambda_star;
  fit.c_low = validate_assumptions(spec).c_low;
  fit.lower_bound = fit.c_low * (sol.lambda - lambda_star);
  return fit;
}

double rate_functional_lower(const DriftField& d, const Field& mu, const std::vector<Field>& test_family) {
  if (!mu.grid.same_nodes(d.grid)) throw Error(ErrorKind::PreconditionViolation, "mu must live on the drift grid");
  double best = 0.0;  // the constant test function contributes exactly 0
  for (const Field& u : test_family) {
    if (!u.grid.same_nodes(d.grid)) {
      throw Error(ErrorKind::PreconditionViolation, "test functions must live on the drift grid");
    }
    for (double v : u.values) {
      if (!(v > 0.0)) throw Error(ErrorKind::NonPositiveTest, "test function must be strictly positive");
    }
    const Field du = derivative(u);
    const Field d2u = second_derivative(u);
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      f[i] = (0.5 * d.a[i] * d2u[i] + d.m[i] * du[i]) / u[i] * mu[i];
    }
    best = std::max(best, -integrate(Field(d.grid, std::move(f))));
  }
  return best;
}

}  // namespace ergo

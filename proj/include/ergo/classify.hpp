#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ergo/dirichlet.hpp"

namespace ergo {

/// Polynomial continuation of a drift beyond the grid on one side.
struct TailModel {
  std::vector<double> coeffs;  // m_tail(x) = sum coeffs[k] x^k
  double a = 1.0;              // diffusion coefficient at infinity

  double eval(double x) const;
  /// Highest degree with |coeff| > zero_tol, -1 when all vanish.
  int leading_degree(double zero_tol = 1e-9) const;
};

/// m = b~ + ahat W' of the diffusion dX = m dt + sqrt(a) dB on a grid.
struct DriftField {
  Grid grid;
  Field m;
  Field a;
  TailModel left;
  TailModel right;
  /// True when the tails come from a fitted quadratic of W rather than an
  /// exact closed form.
  bool extrapolated = false;

  /// Grid values inside; beyond the grid the tail polynomial, shifted to be
  /// continuous at the edge.
  double drift(double x) const;
  double diffusion(double x) const;

  /// m(x) = sum coeffs[k] x^k with constant a, exact tails.
  static DriftField polynomial(const Grid& grid, std::vector<double> coeffs, double a);
  static DriftField linear(const Grid& grid, double slope, double a) { return polynomial(grid, {0.0, slope}, a); }
};

/// m = b~ + ahat dW nodewise (one-sided stencils at the ends). The tail adds
/// the polynomial part of b to const(ahat) * (2 q x + p), with W ~ q x^2 + p x
/// fitted on the outer 20% of each side.
DriftField drift_of(const ProblemSpec& spec, const GridSolution& sol);

enum class Verdict { Ergodic, NullRecurrent, Transient };
enum class ScaleBehavior { Diverges, Converges };
std::string to_string(Verdict v);
std::string to_string(ScaleBehavior s);

struct SideEvidence {
  double scale_inner = 0.0;  // integral of s' over [0, r/2]
  double scale_outer = 0.0;  // integral of s' over [r/2, r]
  double speed_inner = 0.0;
  double speed_outer = 0.0;
  bool numeric_scale_diverges = false;
  bool numeric_speed_finite = false;
  bool analytic_scale_diverges = false;
  bool analytic_speed_finite = false;
  std::string tail;  // "inward", "outward" or "neutral"
};

struct Classification {
  Verdict verdict = Verdict::Transient;
  ScaleBehavior scale_left = ScaleBehavior::Converges;
  ScaleBehavior scale_right = ScaleBehavior::Converges;
  double speed_mass = std::numeric_limits<double>::infinity();
  std::optional<Field> invariant_density;
  SideEvidence left;
  SideEvidence right;
  double probe_radius = 0.0;
};

/// Scale/speed test on [-r, r] combined with the analytic tail sign.
/// Throws Inconclusive when the two disagree.
Classification scale_classify(const DriftField& d, double probe_radius);

/// drift_of then scale_classify at 0.8 R.
Classification classify_solution(const ProblemSpec& spec, const GridSolution& sol);

/// (2/a) exp(int_0^x 2m/a) on the grid, trapezoid cumulative integral,
/// normalized to unit trapezoid mass.
Field speed_density(const DriftField& d);

struct SimulationOptions {
  double kill_factor = 4.0;        // paths die outside [-kill_factor R, kill_factor R]
  double exit_radius = -1.0;       // defaults to the grid radius
  double histogram_radius = -1.0;  // defaults to the grid radius
  double bin_width = 0.1;
  std::size_t record_points = 101;  // samples of the exit curve and mean path
};

struct SimulationReport {
  std::size_t n_paths = 0;
  double dt = 0.0;
  double T = 0.0;
  std::uint64_t seed = 0;
  double x0 = 0.0;
  double exit_radius = 0.0;
  std::size_t killed = 0;
  std::vector<double> times;          // record times
  std::vector<double> exit_fraction;  // at each record time
  std::vector<double> mean_path;      // mean of X over all paths (killed paths frozen)
  Field occupation;                   // per-bin density, bin centers as nodes
  double bin_width = 0.0;
  double inside_fraction = 0.0;       // sum(occupation) * bin_width
};

/// Euler-Maruyama; path p draws from mt19937_64 seeded by (seed, p), so
/// results do not depend on evaluation order.
SimulationReport simulate_em(const DriftField& d, double x0, double T, double dt, std::size_t n_paths,
                             std::uint64_t seed, const SimulationOptions& opts = {});

struct DecayPoint {
  double t = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t hits = 0;
};

struct DecayFit {
  double rho = 0.0;
  double lambda = 0.0;
  double lambda_star = 0.0;
  double c_low = 0.0;
  double lower_bound = 0.0;  // c_low (lambda - lambda_star)
  std::vector<DecayPoint> points;
  std::size_t fitted_points = 0;
};

/// Monte Carlo E_x0[1_support(X_t); t < kill] on T_grid; weighted
/// log-linear fit over points with at least 10 hits gives rho.
/// Throws InsufficientMass when fewer than two points qualify.
DecayFit decay_rate(const ProblemSpec& spec, const GridSolution& sol, double lambda_star,
                    std::pair<double, double> support, double x0, const std::vector<double>& T_grid,
                    std::size_t n_paths = 10000, double dt = 1e-3, std::uint64_t seed = 42);

/// Same as decay_rate, on an explicit drift.
DecayFit decay_rate_drift(const DriftField& d, std::pair<double, double> support, double x0,
                          const std::vector<double>& T_grid, std::size_t n_paths, double dt, std::uint64_t seed);

/// max over the family (plus the constant) of -int (Lu/u) mu with
/// L = 1/2 a d2 + m d. NonPositiveTest when a test function is not > 0.
double rate_functional_lower(const DriftField& d, const Field& mu, const std::vector<Field>& test_family);

}  // namespace ergo

#include "ergo/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "ergo/errors.hpp"
#include "ergo/grid.hpp"

namespace ergo {

CoefficientModel1D CoefficientModel1D::constant_field(double c) {
  CoefficientModel1D m;
  m.constant = c;
  return m;
}

CoefficientModel1D CoefficientModel1D::monomial(int degree, double coeff) {
  CoefficientModel1D m;
  if (degree == 0) {
    m.constant = coeff;
  } else {
    m.poly.push_back({degree, coeff});
  }
  return m;
}

CoefficientModel1D CoefficientModel1D::bump(double amplitude, double center, double width) {
  CoefficientModel1D m;
  m.bumps.push_back({amplitude, center, width});
  return m;
}

double CoefficientModel1D::poly_coeff(int k) const {
  double c = (k == 0) ? constant : 0.0;
  for (const auto& t : poly) {
    if (t.degree == k) c += t.coeff;
  }
  return c;
}

int CoefficientModel1D::leading_degree(double zero_tol) const {
  for (int k = 4; k >= 0; --k) {
    if (std::abs(poly_coeff(k)) > zero_tol) return k;
  }
  return -1;
}

bool CoefficientModel1D::is_bounded() const {
  return std::none_of(poly.begin(), poly.end(),
                      [](const PolyTerm& t) { return t.degree >= 1 && t.coeff != 0.0; });
}

bool CoefficientModel1D::is_constant() const {
  return is_bounded() && std::all_of(bumps.begin(), bumps.end(),
                                     [](const Bump& b) { return b.amplitude == 0.0; });
}

CoefficientModel1D CoefficientModel1D::scaled(double factor) const {
  CoefficientModel1D m = *this;
  m.constant *= factor;
  for (auto& t : m.poly) t.coeff *= factor;
  for (auto& b : m.bumps) b.amplitude *= factor;
  return m;
}

CoefficientModel1D operator+(const CoefficientModel1D& lhs, const CoefficientModel1D& rhs) {
  CoefficientModel1D m = lhs;
  m.constant += rhs.constant;
  m.poly.insert(m.poly.end(), rhs.poly.begin(), rhs.poly.end());
  m.bumps.insert(m.bumps.end(), rhs.bumps.begin(), rhs.bumps.end());
  return m;
}

double eval_coeff(const CoefficientModel1D& c, double x, int order) {
  if (order < 0 || order > 2) {
    throw Error(ErrorKind::PreconditionViolation, "eval_coeff order must be 0, 1 or 2");
  }
  double value = (order == 0) ? c.constant : 0.0;
  for (const auto& t : c.poly) {
    const int k = t.degree;
    if (order == 0) {
      value += t.coeff * std::pow(x, k);
    } else if (order == 1) {
      if (k >= 1) value += t.coeff * k * std::pow(x, k - 1);
    } else {
      if (k >= 2) value += t.coeff * k * (k - 1) * std::pow(x, k - 2);
    }
  }
  for (const auto& b : c.bumps) {
    const double u = (x - b.center) / b.width;
    const double g = b.amplitude * std::exp(-0.5 * u * u);
    if (order == 0) {
      value += g;
    } else if (order == 1) {
      value += -u / b.width * g;
    } else {
      value += (u * u - 1.0) / (b.width * b.width) * g;
    }
  }
  return value;
}

double sup_abs(const CoefficientModel1D& c, double radius, std::size_t samples) {
  double s = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = -radius + 2.0 * radius * static_cast<double>(i) / static_cast<double>(samples - 1);
    s = std::max(s, std::abs(eval_coeff(c, x)));
  }
  for (const auto& b : c.bumps) {
    s = std::max(s, std::abs(eval_coeff(c, b.center)));
  }
  return s;
}

const Pde1D& ProblemSpec::pde() const {
  if (!is_pde()) throw Error(ErrorKind::PreconditionViolation, "problem '" + name + "' is not a 1-D PDE");
  return std::get<Pde1D>(data);
}

Pde1D& ProblemSpec::pde() {
  if (!is_pde()) throw Error(ErrorKind::PreconditionViolation, "problem '" + name + "' is not a 1-D PDE");
  return std::get<Pde1D>(data);
}

const LeqgNd& ProblemSpec::leqg() const {
  if (is_pde()) throw Error(ErrorKind::PreconditionViolation, "problem '" + name + "' is not an LEQG system");
  return std::get<LeqgNd>(data);
}

namespace {

void check_coefficient(const CoefficientModel1D& c, const std::string& field) {
  for (const auto& t : c.poly) {
    if (t.degree < 0 || t.degree > 4) {
      throw Error(ErrorKind::ConfigError, field + ": polynomial degree must lie in 0..4");
    }
  }
  for (const auto& b : c.bumps) {
    if (!(b.width > 0.0)) throw Error(ErrorKind::ConfigError, field + ": bump width must be positive");
  }
}

bool symmetric(const Eigen::MatrixXd& m) { return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12; }

bool positive_definite(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().minCoeff() > 0.0;
}

bool is_diagonal(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd off = m;
  off.diagonal().setZero();
  return off.cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

void check_structure(const ProblemSpec& spec) {
  if (spec.is_pde()) {
    const auto& p = spec.pde();
    check_coefficient(p.a, "a");
    check_coefficient(p.ahat, "ahat");
    check_coefficient(p.b, "b");
    check_coefficient(p.v0, "v0");
    check_coefficient(p.vbar, "vbar");
    check_coefficient(p.w0, "w0");
    if (!p.a.is_bounded()) throw Error(ErrorKind::ConfigError, "a: polynomial terms of degree >= 1 are not allowed");
    if (!p.ahat.is_bounded()) {
      throw Error(ErrorKind::ConfigError, "ahat: polynomial terms of degree >= 1 are not allowed");
    }
    if (!(p.domain_radius > 0.0)) throw Error(ErrorKind::ConfigError, "domain_radius must be positive");
    return;
  }
  const auto& q = spec.leqg();
  const auto n = q.D.rows();
  if (n == 0 || q.D.cols() != n || q.M.rows() != n || q.M.cols() != n || q.a.rows() != n || q.a.cols() != n ||
      q.ahat.rows() != n || q.ahat.cols() != n || q.v.size() != n) {
    throw Error(ErrorKind::ConfigError, "LEQG matrices must be N x N and v of length N");
  }
  if (!symmetric(q.M)) throw Error(ErrorKind::ConfigError, "M must be symmetric");
  if (!symmetric(q.a) || !positive_definite(q.a)) {
    throw Error(ErrorKind::ConfigError, "a must be symmetric positive-definite");
  }
  if (!symmetric(q.ahat) || !positive_definite(q.ahat)) {
    throw Error(ErrorKind::ConfigError, "ahat must be symmetric positive-definite");
  }
}

double u0_at(const Pde1D& p, double x) {
  const double w1 = eval_coeff(p.w0, x, 1);
  const double w2 = eval_coeff(p.w0, x, 2);
  const double a = eval_coeff(p.a, x);
  const double da = eval_coeff(p.a, x, 1);
  const double g = 0.5 * (a * w2 + da * w1) + 0.5 * eval_coeff(p.ahat, x) * w1 * w1 + eval_coeff(p.b, x) * w1 +
                   eval_coeff(p.v0, x);
  return -g;
}

AssumptionReport validate_assumptions(const ProblemSpec& spec, double window_radius, int annuli) {
  if (!(window_radius > 0.0) || annuli < 2) {
    throw Error(ErrorKind::PreconditionViolation, "window_radius > 0 and annuli >= 2 required");
  }
  AssumptionReport rep;
  rep.window_radius = window_radius;

  if (!spec.is_pde()) {
    const auto& q = spec.leqg();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(q.a), eh(q.ahat), em(q.M);
    rep.nu1 = ea.eigenvalues().minCoeff();
    rep.nu2 = ea.eigenvalues().maxCoeff();
    rep.mu1 = eh.eigenvalues().minCoeff();
    rep.mu2 = eh.eigenvalues().maxCoeff();
    if (rep.nu1 <= 0.0 || rep.mu1 <= 0.0) throw Error(ErrorKind::NonElliptic, "a or ahat is not positive-definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> gen(q.ahat, q.a);
    rep.c_low = gen.eigenvalues().minCoeff();
    rep.c_high = gen.eigenvalues().maxCoeff();
    rep.a1_passed = true;
    rep.a2_passed = true;
    rep.a3_passed = em.eigenvalues().maxCoeff() < 0.0;
    rep.a3_note = rep.a3_passed ? "M negative-definite" : "failed";
    return rep;
  }

  const auto& p = spec.pde();
  constexpr std::size_t samples = 4801;
  rep.nu1 = rep.mu1 = rep.c_low = std::numeric_limits<double>::infinity();
  rep.nu2 = rep.mu2 = rep.c_high = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = -window_radius + 2.0 * window_radius * static_cast<double>(i) / (samples - 1);
    const double a = eval_coeff(p.a, x);
    const double ah = eval_coeff(p.ahat, x);
    if (!(a > 0.0)) throw Error(ErrorKind::NonElliptic, "a(x) <= 0 at x = " + std::to_string(x));
    if (!(ah > 0.0)) throw Error(ErrorKind::NonElliptic, "ahat(x) <= 0 at x = " + std::to_string(x));
    rep.nu1 = std::min(rep.nu1, a);
    rep.nu2 = std::max(rep.nu2, a);
    rep.mu1 = std::min(rep.mu1, ah);
    rep.mu2 = std::max(rep.mu2, ah);
    rep.c_low = std::min(rep.c_low, ah / a);
    rep.c_high = std::max(rep.c_high, ah / a);
  }
  rep.a1_passed = p.a.is_bounded();
  rep.a2_passed = p.ahat.is_bounded();

  // annulus k covers r_{k-1} <= |x| <= r_k
  const double dr = window_radius / annuli;
  constexpr int per_annulus = 400;
  for (int k = 1; k <= annuli; ++k) {
    const double r0 = (k - 1) * dr;
    double lo = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= per_annulus; ++j) {
      const double r = r0 + dr * j / per_annulus;
      lo = std::min({lo, u0_at(p, r), u0_at(p, -r)});
    }
    rep.annulus_outer_radii.push_back(k * dr);
    rep.u0_annulus_min.push_back(lo);
  }
  bool increasing = true;
  for (int k = annuli / 2; k + 1 < annuli; ++k) {
    if (!(rep.u0_annulus_min[k + 1] > rep.u0_annulus_min[k])) increasing = false;
  }
  const double global_min = *std::min_element(rep.u0_annulus_min.begin(), rep.u0_annulus_min.end());
  rep.a3_passed = increasing;
  if (increasing) {
    rep.a3_note = "checked on window";
  } else if (std::isfinite(global_min)) {
    rep.a3_note = "bounded only";
  } else {
    rep.a3_note = "failed";
  }
  return rep;
}

CoefficientModel1D default_supersolution(const CoefficientModel1D& b, const CoefficientModel1D& v0) {
  const int kv = v0.leading_degree();
  if (kv >= 1 && kv % 2 == 0 && v0.poly_coeff(kv) < 0.0) return {};
  const int kb = b.leading_degree();
  if (kb >= 1 && kb % 2 == 1) {
    return CoefficientModel1D::monomial(2, b.poly_coeff(kb) < 0.0 ? 0.1 : -0.1);
  }
  return {};
}

namespace {

using C = CoefficientModel1D;

ProblemSpec pde(std::string name, C a, C ahat, C b, C v0, C vbar, C w0) {
  Pde1D p;
  p.a = std::move(a);
  p.ahat = std::move(ahat);
  p.b = std::move(b);
  p.v0 = std::move(v0);
  p.vbar = std::move(vbar);
  p.w0 = std::move(w0);
  return ProblemSpec{std::move(name), p};
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"ou-quadratic", "ou-bounded-v", "outward-drift", "confining-v", "ou-tilted", "leqg-2d"};
}

ProblemSpec builtin(const std::string& name) {
  const C one = C::constant_field(1.0);
  if (name == "ou-quadratic") {
    return pde(name, one, one, C::monomial(1, -1.0), C::monomial(2, -0.5), {}, {});
  }
  if (name == "ou-bounded-v") {
    return pde(name, one, one, C::monomial(1, -1.0), {}, C::bump(1.0, 0.0, 1.0), C::monomial(2, 0.1));
  }
  if (name == "outward-drift") {
    return pde(name, one, one, C::monomial(1, 1.0), C::bump(1.0, 0.0, 1.0), {}, C::monomial(2, -0.1));
  }
  if (name == "confining-v") {
    return pde(name, one, one, {}, C::monomial(2, -1.0), {}, {});
  }
  if (name == "ou-tilted") {
    return pde(name, one, one, C::monomial(1, -1.0), C::monomial(2, -0.5) + C::monomial(1, 1.0), {}, {});
  }
  if (name == "leqg-2d") {
    LeqgNd q;
    q.D = Eigen::Vector2d(-1.0, -0.5).asDiagonal();
    q.M = Eigen::Vector2d(-1.0, -2.0).asDiagonal();
    q.a = Eigen::Vector2d(1.0, 0.5).asDiagonal();
    q.ahat = Eigen::Matrix2d::Identity();
    q.v = Eigen::Vector2d(0.0, 0.5);
    return ProblemSpec{name, q};
  }
  throw Error(ErrorKind::UnknownProblem, "no built-in problem named '" + name + "'");
}

std::optional<Leqg1D> leqg_view(const Pde1D& p) {
  if (!p.a.is_constant() || !p.ahat.is_constant()) return std::nullopt;
  if (p.b.has_bumps() || p.v0.has_bumps() || p.vbar.has_bumps()) return std::nullopt;
  if (p.b.leading_degree() > 1 || p.b.poly_coeff(0) != 0.0) return std::nullopt;
  const C V = p.v0 + p.vbar;
  if (V.leading_degree() > 2) return std::nullopt;
  Leqg1D q;
  q.a = p.a.constant;
  q.ahat = p.ahat.constant;
  q.D = p.b.poly_coeff(1);
  q.M = 2.0 * V.poly_coeff(2);
  q.v = V.poly_coeff(1);
  q.c0 = V.poly_coeff(0);
  return q;
}

ProblemSpec project_coordinate(const ProblemSpec& spec, Eigen::Index i) {
  const auto& q = spec.leqg();
  if (i < 0 || i >= q.dim()) throw Error(ErrorKind::PreconditionViolation, "coordinate index out of range");
  if (!is_diagonal(q.D) || !is_diagonal(q.M) || !is_diagonal(q.a) || !is_diagonal(q.ahat)) {
    throw Error(ErrorKind::PreconditionViolation, "coordinate projection needs a decoupled (diagonal) system");
  }
  C v0 = C::monomial(2, 0.5 * q.M(i, i));
  if (q.v(i) != 0.0) v0 = v0 + C::monomial(1, q.v(i));
  const C b = C::monomial(1, q.D(i, i));
  return pde(spec.name + "[" + std::to_string(i) + "]", C::constant_field(q.a(i, i)),
             C::constant_field(q.ahat(i, i)), b, v0, {}, default_supersolution(b, v0));
}

ProblemSpec with_vbar(const ProblemSpec& spec, const CoefficientModel1D& vbar) {
  ProblemSpec out = spec;
  out.pde().vbar = vbar;
  return out;
}

ProblemSpec with_shift(const ProblemSpec& spec, double alpha) {
  ProblemSpec out = spec;
  out.pde().v0.constant += alpha;
  return out;
}

SampledCoefficients sample_coefficients(const Pde1D& p, const Grid& grid) {
  const std::size_t n = grid.size();
  SampledCoefficients s;
  for (auto* v : {&s.a, &s.da, &s.ahat, &s.b, &s.btilde, &s.v0, &s.V}) v->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    s.a[i] = eval_coeff(p.a, x);
    s.da[i] = eval_coeff(p.a, x, 1);
    s.ahat[i] = eval_coeff(p.ahat, x);
    s.b[i] = eval_coeff(p.b, x);
    s.btilde[i] = s.b[i] + 0.5 * s.da[i];
    s.v0[i] = eval_coeff(p.v0, x);
    s.V[i] = s.v0[i] + eval_coeff(p.vbar, x);
  }
  return s;
}

}  // namespace ergo

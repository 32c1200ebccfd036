#include "ergo/leqg.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ergo/errors.hpp"

namespace ergo {

std::pair<double, double> riccati_roots_1d(double D, double M, double /*a*/, double ahat) {
  if (!(ahat > 0.0)) throw Error(ErrorKind::PreconditionViolation, "ahat must be positive");
  const double disc = (D / ahat) * (D / ahat) - M / ahat;
  if (disc < 0.0) throw Error(ErrorKind::ComplexRoots, "discriminant " + std::to_string(disc) + " < 0");
  const double s = std::sqrt(disc);
  const double km = -D / ahat - s;
  const double kp = -D / ahat + s;
  for (double k : {km, kp}) {
    const double r = ahat * k * k + 2.0 * D * k + M;
    const double scale = std::max({1.0, std::abs(M), std::abs(D * k), ahat * k * k});
    if (std::abs(r) > 1e-12 * scale) {
      throw Error(ErrorKind::PreconditionViolation, "Riccati root failed back-substitution");
    }
  }
  return {km, kp};
}

Eigen::MatrixXd riccati_stabilizing_nd(const Eigen::MatrixXd& D, const Eigen::MatrixXd& M,
                                       const Eigen::MatrixXd& ahat) {
  const Eigen::Index n = D.rows();
  Eigen::MatrixXd H(2 * n, 2 * n);
  H << D, ahat, -M, -D.transpose();
  Eigen::EigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NoStabilizing, "Hamiltonian eigen-decomposition failed");

  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> stable;
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    const double re = es.eigenvalues()(k).real();
    if (std::abs(re) <= 1e-10 * scale) {
      throw Error(ErrorKind::NoStabilizing, "Hamiltonian has eigenvalues on the imaginary axis");
    }
    if (re < 0.0) stable.push_back(k);
  }
  if (static_cast<Eigen::Index>(stable.size()) != n) {
    throw Error(ErrorKind::NoStabilizing, "stable subspace has dimension " + std::to_string(stable.size()) +
                                              ", expected " + std::to_string(n));
  }
  Eigen::MatrixXcd U(n, n), V(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::VectorXcd col = es.eigenvectors().col(stable[static_cast<std::size_t>(j)]);
    U.col(j) = col.head(n);
    V.col(j) = col.tail(n);
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(U);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) throw Error(ErrorKind::NoStabilizing, "U block is singular");
  const Eigen::MatrixXcd Kc = V * lu.inverse();
  if (Kc.imag().cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, Kc.real().cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::NoStabilizing, "stable-subspace solution is not real");
  }
  Eigen::MatrixXd K = Kc.real();
  K = 0.5 * (K + K.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ek(K);
  if (ek.eigenvalues().maxCoeff() > 1e-10) throw Error(ErrorKind::NoStabilizing, "solution is not nonpositive");
  Eigen::EigenSolver<Eigen::MatrixXd> closed(D + ahat * K);
  if (closed.eigenvalues().real().maxCoeff() >= 0.0) {
    throw Error(ErrorKind::NoStabilizing, "D + ahat K is not stable");
  }
  return K;
}

LeqgSolution assemble_with(const Eigen::MatrixXd& K, const Eigen::MatrixXd& D, const Eigen::MatrixXd& M,
                           const Eigen::MatrixXd& a, const Eigen::MatrixXd& ahat, const Eigen::VectorXd& v) {
  LeqgSolution s;
  s.K = K;
  const Eigen::MatrixXd L = D.transpose() + K * ahat;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) {
    throw Error(ErrorKind::SingularLinearSolve, "D' + K ahat is singular");
  }
  s.e = lu.solve(-v);
  s.lambda = 0.5 * (a * K).trace() + 0.5 * s.e.dot(ahat * s.e);
  Eigen::EigenSolver<Eigen::MatrixXd> closed(D + ahat * K);
  s.stability_margin = -closed.eigenvalues().real().maxCoeff();
  s.stable = s.stability_margin > 0.0;
  s.riccati_residual = (K * ahat * K + D.transpose() * K + K * D + M).cwiseAbs().maxCoeff();
  s.linear_residual = (L * s.e + v).cwiseAbs().maxCoeff();
  return s;
}

LeqgSolution assemble(const Eigen::MatrixXd& D, const Eigen::MatrixXd& M, const Eigen::MatrixXd& a,
                      const Eigen::MatrixXd& ahat, const Eigen::VectorXd& v) {
  Eigen::MatrixXd K;
  if (D.rows() == 1) {
    K = Eigen::MatrixXd::Constant(1, 1, riccati_roots_1d(D(0, 0), M(0, 0), a(0, 0), ahat(0, 0)).first);
  } else {
    K = riccati_stabilizing_nd(D, M, ahat);
  }
  LeqgSolution s = assemble_with(K, D, M, a, ahat, v);
  if (s.riccati_residual > 1e-10 || s.linear_residual > 1e-10) {
    throw Error(ErrorKind::NoStabilizing, "residual check failed (Riccati " + std::to_string(s.riccati_residual) +
                                              ", linear " + std::to_string(s.linear_residual) + ")");
  }
  return s;
}

LeqgSolution assemble(const LeqgNd& q) { return assemble(q.D, q.M, q.a, q.ahat, q.v); }

std::optional<LeqgSolution> leqg_oracle(const Pde1D& p) {
  const auto view = leqg_view(p);
  if (!view) return std::nullopt;
  auto one = [](double v) { return Eigen::MatrixXd::Constant(1, 1, v); };
  LeqgSolution s = assemble(one(view->D), one(view->M), one(view->a), one(view->ahat),
                            Eigen::VectorXd::Constant(1, view->v));
  s.lambda += view->c0;
  return s;
}

}  // namespace ergo

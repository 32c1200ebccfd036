#pragma once

#include <utility>

#include <Eigen/Dense>

#include "ergo/problem.hpp"

namespace ergo {

struct LeqgSolution {
  Eigen::MatrixXd K;
  Eigen::VectorXd e;
  double lambda = 0.0;
  bool stable = false;
  double stability_margin = 0.0;  // -max Re eig(D + ahat K)
  double riccati_residual = 0.0;  // max |K ahat K + D'K + K D + M|
  double linear_residual = 0.0;   // max |(D' + K ahat) e + v|
};

/// Roots of ahat K^2 + 2 D K + M = 0, K_- <= K_+. The expression is
/// back-substituted before returning. Throws ComplexRoots.
std::pair<double, double> riccati_roots_1d(double D, double M, double a, double ahat);

/// Stabilizing solution from the stable invariant subspace of
/// [[D, ahat], [-M, -D']]. Throws NoStabilizing.
Eigen::MatrixXd riccati_stabilizing_nd(const Eigen::MatrixXd& D, const Eigen::MatrixXd& M,
                                       const Eigen::MatrixXd& ahat);

/// e from (D' + K ahat) e = -v, lambda = tr(a K)/2 + e.ahat e/2.
/// Throws SingularLinearSolve.
LeqgSolution assemble(const Eigen::MatrixXd& D, const Eigen::MatrixXd& M, const Eigen::MatrixXd& a,
                      const Eigen::MatrixXd& ahat, const Eigen::VectorXd& v);
LeqgSolution assemble(const LeqgNd& q);

/// Same with a given K (either branch in 1-D).
LeqgSolution assemble_with(const Eigen::MatrixXd& K, const Eigen::MatrixXd& D, const Eigen::MatrixXd& M,
                           const Eigen::MatrixXd& a, const Eigen::MatrixXd& ahat, const Eigen::VectorXd& v);

/// Closed form for a 1-D problem in the linear-quadratic family, including
/// the constant part of V. Empty outside the family.
std::optional<LeqgSolution> leqg_oracle(const Pde1D& p);

}  // namespace ergo

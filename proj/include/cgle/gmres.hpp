#pragma once

#include <functional>
#include <optional>

#include <Eigen/Core>

namespace cgle {

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct GmresConfig {
  /// Stop when ||M^{-1}(b - A x)|| <= tol * ||M^{-1} b||.
  double tol = 1e-9;
  int max_iter = 3000;
  /// Krylov dimension before restarting; unset means full GMRES.
  std::optional<int> restart;
};

struct GmresResult {
  Eigen::VectorXd x;
  /// Operator applications (Arnoldi steps) performed.
  int iterations = 0;
  bool converged = false;
  /// Arnoldi produced a zero vector before the tolerance was met (singular operator).
  bool breakdown = false;
  /// Final preconditioned residual relative to ||M^{-1} b||.
  double relative_residual = 0.0;
};

/// Left-preconditioned GMRES, modified Gram-Schmidt with one selective
/// reorthogonalization pass, Givens least squares. `precond` applies M^{-1};
/// pass an empty function for no preconditioning.
GmresResult gmres(const LinearOperator& apply, const Eigen::VectorXd& b, const GmresConfig& cfg,
                  const LinearOperator& precond = {});

}  // namespace cgle

#include "cgle/gmres.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "cgle/error.hpp"

namespace cgle {

namespace {

void givens(double a, double b, double& c, double& s) {
  if (a == 0.0 && b == 0.0) {
    // Zero column: the rotation must not reduce the residual.
    c = 0.0;
    s = 1.0;
  } else if (b == 0.0) {
    c = 1.0;
    s = 0.0;
  } else if (std::abs(b) > std::abs(a)) {
    const double t = a / b;
    s = 1.0 / std::sqrt(1.0 + t * t);
    c = s * t;
  } else {
    const double t = b / a;
    c = 1.0 / std::sqrt(1.0 + t * t);
    s = c * t;
  }
}

}  // namespace

GmresResult gmres(const LinearOperator& apply, const Eigen::VectorXd& b, const GmresConfig& cfg,
                  const LinearOperator& precond) {
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1) throw DomainError("gmres: need tol > 0 and max_iter >= 1");
  auto prec = [&](const Eigen::VectorXd& v) { return precond ? precond(v) : v; };

  const Eigen::Index n = b.size();
  GmresResult res;
  res.x = Eigen::VectorXd::Zero(n);

  const Eigen::VectorXd pb = prec(b);
  const double beta0 = pb.norm();
  if (beta0 == 0.0) {
    res.converged = true;
    return res;
  }
  const double target = cfg.tol * beta0;
  const int cycle = cfg.restart ? std::max(1, *cfg.restart) : cfg.max_iter;

  Eigen::VectorXd r = pb;
  while (true) {
    const double beta = r.norm();
    if (beta <= target) {
      res.converged = true;
      res.relative_residual = beta / beta0;
      return res;
    }
    const int m = std::min(cycle, cfg.max_iter - res.iterations);
    std::vector<Eigen::VectorXd> V;
    V.reserve(static_cast<std::size_t>(m) + 1);
    V.push_back(r / beta);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    std::vector<double> cs(m), sn(m);
    g[0] = beta;

    int j = 0;
    double resid = beta;
    bool stop = false;
    for (; j < m; ++j) {
      Eigen::VectorXd w = prec(apply(V[j]));
      ++res.iterations;
      const double wnorm0 = w.norm();
      for (int i = 0; i <= j; ++i) {
        const double h = w.dot(V[i]);
        H(i, j) = h;
        w -= h * V[i];
      }
      if (w.norm() < 0.7 * wnorm0) {
        for (int i = 0; i <= j; ++i) {
          const double h = w.dot(V[i]);
          H(i, j) += h;
          w -= h * V[i];
        }
      }
      const double hnext = w.norm();
      H(j + 1, j) = hnext;

      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      givens(H(j, j), H(j + 1, j), cs[j], sn[j]);
      H(j, j) = cs[j] * H(j, j) + sn[j] * H(j + 1, j);
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      resid = std::abs(g[j + 1]);

      const bool invariant = hnext <= 1e-14 * wnorm0 || hnext == 0.0;
      if (resid <= target || invariant) {
        if (invariant && resid > target) res.breakdown = true;
        ++j;
        stop = true;
        break;
      }
      V.push_back(w / hnext);
    }

    // Back substitution on the triangularized Hessenberg block.
    Eigen::VectorXd y = g.head(j);
    for (int i = j - 1; i >= 0; --i) {
      for (int k = i + 1; k < j; ++k) y[i] -= H(i, k) * y[k];
      if (H(i, i) == 0.0) {
        y[i] = 0.0;
        res.breakdown = true;
      } else {
        y[i] /= H(i, i);
      }
    }
    for (int i = 0; i < j; ++i) res.x += y[i] * V[i];

    res.relative_residual = resid / beta0;
    if (resid <= target) {
      res.converged = true;
      return res;
    }
    if (stop || res.iterations >= cfg.max_iter) return res;
    r = prec(b - apply(res.x));
  }
}

}  // namespace cgle

#include "cgle/newton.hpp"

#include <cmath>
#include <sstream>

#include "cgle/error.hpp"

namespace cgle {

bool NewtonProblem::accept(const RealVector&, const RealVector& g, const NewtonConfig& cfg) const {
  return g.norm() <= cfg.f_tol;
}

NewtonTrace newton_iterate(const NewtonProblem& problem, RealVector x0, const NewtonConfig& ncfg,
                           const BorderedConfig& bcfg) {
  if (ncfg.max_iter < 0 || !(ncfg.f_tol > 0.0)) throw DomainError("newton: need max_iter >= 0 and f_tol > 0");
  NewtonTrace t;
  t.x = std::move(x0);
  RealVector g = problem.residual(t.x);
  t.history.push_back(g.norm());

  while (true) {
    if (problem.accept(t.x, g, ncfg)) {
      t.converged = true;
      return t;
    }
    if (t.iterations() >= ncfg.max_iter) {
      std::ostringstream os;
      os << "no convergence in " << ncfg.max_iter << " iterations (residual " << t.history.back() << ")";
      t.message = os.str();
      return t;
    }
    const auto jac = problem.linearize(t.x);
    auto [z, report] = min_norm_solve(*jac, -g, bcfg);
    t.steps.push_back(report);
    if (!report.success) {
      t.message = "Newton step failed: " + report.failure;
      return t;
    }
    t.x += z;
    try {
      g = problem.residual(t.x);
    } catch (const DomainError& e) {
      t.message = std::string("Newton iterate left the domain: ") + e.what();
      return t;
    }
    const double gn = g.norm();
    t.history.push_back(gn);
    if (!std::isfinite(gn)) {
      t.message = "Newton iterate diverged";
      return t;
    }
  }
}

namespace {

class CgleProblem final : public NewtonProblem {
 public:
  explicit CgleProblem(const StatePoint& s) : grid_(s.grid()), params_(s.params) {}

  RealVector residual(const RealVector& x) const override { return cgle::residual(state(x)); }
  std::unique_ptr<UnderdeterminedSystem> linearize(const RealVector& x) const override {
    return std::make_unique<CgleJacobian>(state(x));
  }
  StatePoint state(const RealVector& x) const { return unpack(x, grid_, params_); }

 private:
  Grid grid_;
  Parameters params_;
};

}  // namespace

NewtonResult newton_solve(const StatePoint& s0, const NewtonConfig& ncfg, const BorderedConfig& bcfg) {
  const CgleProblem problem(s0);
  NewtonTrace t = newton_iterate(problem, pack(s0), ncfg, bcfg);
  NewtonResult r(problem.state(t.x));
  r.converged = t.converged;
  r.history = std::move(t.history);
  r.steps = std::move(t.steps);
  r.message = std::move(t.message);
  return r;
}

}  // namespace cgle

#include "cgle/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cgle/error.hpp"

namespace cgle {

void ContinuationConfig::validate() const {
  if (!(ds_min > 0.0 && ds_min <= ds0 && ds0 <= ds_max)) {
    throw DomainError("continuation step sizes must satisfy 0 < ds_min <= ds0 <= ds_max");
  }
  if (!(grow >= 1.0) || !(shrink > 0.0 && shrink < 1.0)) {
    throw DomainError("continuation needs grow >= 1 and 0 < shrink < 1");
  }
  if (max_steps < 1) throw DomainError("continuation max_steps must be positive");
  if (!(lambda_weight > 0.0) || !(arclength_tol > 0.0)) {
    throw DomainError("continuation weights and tolerances must be positive");
  }
  if (!std::isfinite(target)) throw DomainError("continuation target must be finite");
}

RealVector joint_vector(const StatePoint& s, Param param) {
  const RealVector x = pack(s);
  RealVector y(x.size() + 1);
  y.head(x.size()) = x;
  y[x.size()] = get(s.params, param);
  return y;
}

StatePoint from_joint(const RealVector& y, const Grid& grid, Parameters base, Param param) {
  if (y.size() != unknown_count(grid) + 1) throw DimensionError("joint vector has wrong length");
  set(base, param, y[y.size() - 1]);
  return unpack(y.head(y.size() - 1), grid, base);
}

double joint_dot(const RealVector& u, const RealVector& v, double lambda_weight) {
  const Index n = u.size() - 1;
  return u.head(n).dot(v.head(n)) + lambda_weight * u[n] * v[n];
}

Prediction predict(const StatePoint& prev, const StatePoint& cur, double ds, Param param, double lambda_weight,
                   std::span<const RealVector> drift) {
  if (!(prev.grid() == cur.grid())) throw DimensionError("predict: grid mismatch");
  const RealVector yp = joint_vector(prev, param);
  const RealVector yc = joint_vector(cur, param);
  RealVector t = yc - yp;
  const double raw = std::sqrt(joint_dot(t, t, lambda_weight));
  const Index q = t.size() - 1;
  for (const RealVector& d : drift) {
    if (d.size() != q) throw DimensionError("predict: drift direction has wrong length");
    t.head(q) -= d.dot(t.head(q)) * d;
  }
  double len = std::sqrt(joint_dot(t, t, lambda_weight));
  if (len <= 1e-12 * raw) len = 0.0;
  if (len == 0.0) {
    t.setZero();
    t[t.size() - 1] = 1.0 / std::sqrt(lambda_weight);
  } else {
    t /= len;
  }
  return Prediction{from_joint(yc + ds * t, cur.grid(), cur.params, param), t};
}

namespace {

class AugmentedJacobian final : public UnderdeterminedSystem {
 public:
  AugmentedJacobian(StatePoint s, Param param, RealVector tangent, double weight)
      : base_(std::move(s)),
        dlambda_(param_column(base_.state(), param)),
        tangent_(std::move(tangent)),
        weight_(weight) {}

  Index equations() const override { return base_.equations() + 1; }
  Index unknowns() const override { return base_.unknowns() + 1; }

  RealVector apply(const RealVector& v) const override {
    const Index q = base_.unknowns();
    RealVector out(equations());
    out.head(base_.equations()) = base_.apply(v.head(q)) + v[q] * dlambda_;
    out[base_.equations()] = joint_dot(tangent_, v, weight_);
    return out;
  }

  RealVector precondition(const RealVector& r) const override {
    RealVector out = r;
    out.head(base_.equations()) = base_.precondition(r.head(base_.equations()));
    return out;
  }

  std::vector<RealVector> kernel_candidates() const override {
    std::vector<RealVector> out;
    for (const RealVector& c : base_.kernel_candidates()) {
      RealVector e = RealVector::Zero(unknowns());
      e.head(c.size()) = c;
      out.push_back(std::move(e));
    }
    RealVector e = RealVector::Zero(unknowns());
    e[unknowns() - 1] = 1.0;
    out.push_back(std::move(e));
    return out;
  }

 private:
  CgleJacobian base_;
  RealVector dlambda_;
  RealVector tangent_;
  double weight_;
};

class ArclengthProblem final : public NewtonProblem {
 public:
  ArclengthProblem(const StatePoint& cur, const RealVector& tangent, double ds, const ContinuationConfig& cfg)
      : grid_(cur.grid()),
        base_(cur.params),
        cfg_(cfg),
        anchor_(joint_vector(cur, cfg.param)),
        tangent_(tangent),
        ds_(ds) {}

  StatePoint state(const RealVector& y) const { return from_joint(y, grid_, base_, cfg_.param); }

  double arclength_residual(const RealVector& y) const {
    return joint_dot(tangent_, y - anchor_, cfg_.lambda_weight) - ds_;
  }

  RealVector residual(const RealVector& y) const override {
    const RealVector f = cgle::residual(state(y));
    RealVector out(f.size() + 1);
    out.head(f.size()) = f;
    out[f.size()] = arclength_residual(y);
    return out;
  }

  std::unique_ptr<UnderdeterminedSystem> linearize(const RealVector& y) const override {
    return std::make_unique<AugmentedJacobian>(state(y), cfg_.param, tangent_, cfg_.lambda_weight);
  }

  bool accept(const RealVector&, const RealVector& g, const NewtonConfig& ncfg) const override {
    const Index n = g.size() - 1;
    return g.head(n).norm() <= ncfg.f_tol && std::abs(g[n]) <= cfg_.arclength_tol;
  }

 private:
  Grid grid_;
  Parameters base_;
  ContinuationConfig cfg_;
  RealVector anchor_;
  RealVector tangent_;
  double ds_;
};

int max_js(const std::vector<StepReport>& steps) {
  int m = 0;
  for (const auto& s : steps) m = std::max(m, s.max_js_iterations());
  return m;
}

int max_b(const std::vector<StepReport>& steps) {
  int m = 0;
  for (const auto& s : steps) m = std::max(m, s.b_iterations);
  return m;
}

}  // namespace

Correction correct(const Prediction& pred, const StatePoint& cur, double ds, const ContinuationConfig& cfg,
                   const NewtonConfig& ncfg, const BorderedConfig& bcfg) {
  const ArclengthProblem problem(cur, pred.tangent, ds, cfg);
  NewtonTrace trace = newton_iterate(problem, joint_vector(pred.state, cfg.param), ncfg, bcfg);
  Correction c{problem.state(trace.x)};
  c.trace = std::move(trace);
  c.converged = c.trace.converged;
  if (c.state.field.all_finite() && c.state.shift.T > 0.0) {
    c.residual_norm = residual(c.state).norm();
    c.arclength_residual = problem.arclength_residual(c.trace.x);
  } else {
    c.converged = false;
    c.residual_norm = std::numeric_limits<double>::infinity();
  }
  return c;
}

std::string to_string(PathStatus s) {
  switch (s) {
    case PathStatus::reached_target: return "reached_target";
    case PathStatus::stalled: return "stalled";
    case PathStatus::max_steps: return "max_steps";
  }
  return "?";
}

PathRecord run(const StatePoint& s0, const ContinuationConfig& cfg, const NewtonConfig& ncfg,
               const BorderedConfig& bcfg, const ContinuationHooks& hooks) {
  cfg.validate();
  const double f0 = residual(s0).norm();
  if (!(f0 <= ncfg.f_tol)) {
    std::ostringstream os;
    os << "continuation start point is not converged (residual " << f0 << ")";
    throw DomainError(os.str());
  }

  PathRecord path;
  auto accept = [&](PathPoint pt) {
    if (hooks.classify) pt.symmetry = hooks.classify(pt.state);
    path.points.push_back(std::move(pt));
    if (hooks.on_accept) hooks.on_accept(path.points.back());
  };

  const double lambda0 = get(s0.params, cfg.param);
  {
    PathPoint start{s0};
    start.lambda = lambda0;
    start.residual_norm = f0;
    accept(std::move(start));
  }
  if (cfg.target == lambda0) return path;
  const double dir = cfg.target > lambda0 ? 1.0 : -1.0;
  auto beyond = [&](double lambda) { return (lambda - cfg.target) * dir >= 0.0; };

  StatePoint prev = s0;
  double ds = cfg.ds0;
  int step = 0;
  while (true) {
    if (step >= cfg.max_steps) {
      path.status = PathStatus::max_steps;
      path.message = "reached max_steps=" + std::to_string(cfg.max_steps) + " before the target";
      return path;
    }
    const PathPoint& last = path.points.back();
    const StatePoint& cur = last.state;
    const double lambda_cur = last.lambda;
    // The first secant is the pure parameter direction; orient it toward the target.
    const double signed_ds = path.points.size() == 1 ? dir * ds : ds;
    // Motion along ker J at cur (group orbit and period/shift families) carries no branch information.
    const std::vector<RealVector> drift = path.points.size() == 1 ? std::vector<RealVector>{}
                                                                     : estimate_kernel(CgleJacobian(cur));
    const Prediction pred = predict(prev, cur, signed_ds, cfg.param, cfg.lambda_weight, drift);

    Correction corr = correct(pred, cur, signed_ds, cfg, ncfg, bcfg);
    bool ok = corr.converged;
    bool landing = false;
    NewtonResult land{cur};
    if (ok && beyond(get(corr.state.params, cfg.param))) {
      // Land exactly on the target from the secant interpolant between cur and the corrected point.
      const RealVector yc = joint_vector(cur, cfg.param);
      const RealVector yn = joint_vector(corr.state, cfg.param);
      const double frac = (cfg.target - lambda_cur) / (yn[yn.size() - 1] - lambda_cur);
      StatePoint guess = from_joint(yc + frac * (yn - yc), cur.grid(), cur.params, cfg.param);
      set(guess.params, cfg.param, cfg.target);
      land = newton_solve(guess, ncfg, bcfg);
      ok = land.converged;
      landing = true;
    }

    if (!ok) {
      ++path.rejected;
      ds *= cfg.shrink;
      if (ds < cfg.ds_min) {
        path.status = PathStatus::stalled;
        std::ostringstream os;
        os << "step size fell below ds_min=" << cfg.ds_min << " at " << to_string(cfg.param) << "="
           << lambda_cur << " (" << (landing ? land.message : corr.trace.message) << ")";
        path.message = os.str();
        return path;
      }
      continue;
    }

    ++step;
    PathPoint pt{landing ? land.state : corr.state};
    pt.step = step;
    pt.ds = std::abs(signed_ds);
    const std::vector<StepReport>& reports = landing ? land.steps : corr.trace.steps;
    pt.lambda = get(pt.state.params, cfg.param);
    pt.newton_iterations = landing ? land.iterations() : corr.trace.iterations();
    pt.max_gmres_iterations = max_js(reports);
    pt.max_b_iterations = max_b(reports);
    pt.residual_norm = landing ? land.history.back() : corr.residual_norm;
    const RealVector dy = joint_vector(pt.state, cfg.param) - joint_vector(cur, cfg.param);
    pt.arclength = last.arclength + std::sqrt(joint_dot(dy, dy, cfg.lambda_weight));
    prev = cur;
    accept(std::move(pt));
    if (landing) {
      path.status = PathStatus::reached_target;
      return path;
    }
    ds = std::min(cfg.grow * ds, cfg.ds_max);
  }
}

}  // namespace cgle

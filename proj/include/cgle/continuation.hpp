#pragma once

// Pseudo-arclength continuation in one of R, nu, mu. The corrector appends
// the arclength equation <t, y - y_cur> - ds = 0 to F and treats the active
// parameter as an extra unknown, so the augmented system still has three
// more unknowns than equations and reuses the minimum-norm Newton step.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cgle/newton.hpp"
#include "cgle/system.hpp"

namespace cgle {

struct ContinuationConfig {
  Param param = Param::R;
  double target = 0.0;
  double ds0 = 0.02;
  double ds_max = 0.5;
  double ds_min = 1e-4;
  double grow = 1.3;
  double shrink = 0.5;
  int max_steps = 200;
  /// Weight of the parameter in the arclength inner product.
  double lambda_weight = 1.0;
  /// Tolerance on the arclength equation for accepting a corrector result.
  double arclength_tol = 1e-9;

  /// Throws DomainError unless 0 < ds_min <= ds0 <= ds_max, grow >= 1, 0 < shrink < 1.
  void validate() const;
};

/// Joint vector (pack(s), lambda).
RealVector joint_vector(const StatePoint& s, Param param);
StatePoint from_joint(const RealVector& y, const Grid& grid, Parameters base, Param param);

/// Weighted arclength inner product on joint vectors.
double joint_dot(const RealVector& u, const RealVector& v, double lambda_weight);

struct Prediction {
  StatePoint state;
  /// Unit tangent (weighted norm) used for the prediction.
  RealVector tangent;
};

/// cur + ds * t with t the normalized secant from prev to cur, or the unit
/// parameter direction when prev and cur coincide. Components of the secant
/// along `drift` (orthonormal unknown-vector directions, parameter entry zero)
/// are removed first.
Prediction predict(const StatePoint& prev, const StatePoint& cur, double ds, Param param,
                   double lambda_weight = 1.0, std::span<const RealVector> drift = {});

struct Correction {
  explicit Correction(StatePoint s) : state(std::move(s)) {}

  StatePoint state;
  bool converged = false;
  NewtonTrace trace;
  /// ||F|| at the corrected point (parameter included in the state).
  double residual_norm = 0.0;
  /// Value of the arclength equation at the corrected point.
  double arclength_residual = 0.0;
};

Correction correct(const Prediction& pred, const StatePoint& cur, double ds, const ContinuationConfig& cfg,
                   const NewtonConfig& ncfg, const BorderedConfig& bcfg);

struct PathPoint {
  explicit PathPoint(StatePoint s) : state(std::move(s)) {}

  StatePoint state;
  int step = 0;
  double lambda = 0.0;
  /// Arclength step used to reach this point (0 for the start point).
  double ds = 0.0;
  double arclength = 0.0;
  int newton_iterations = 0;
  int max_gmres_iterations = 0;
  int max_b_iterations = 0;
  double residual_norm = 0.0;
  std::string symmetry;
};

enum class PathStatus { reached_target, stalled, max_steps };
std::string to_string(PathStatus s);

struct PathRecord {
  std::vector<PathPoint> points;
  int rejected = 0;
  PathStatus status = PathStatus::reached_target;
  std::string message;
};

struct ContinuationHooks {
  /// Symmetry label stored with every accepted point.
  std::function<std::string(const StatePoint&)> classify;
  /// Called once per accepted point, starting with s0.
  std::function<void(const PathPoint&)> on_accept;
};

/// Follows the branch through s0 until the parameter reaches cfg.target
/// (the last point is solved at exactly the target), ds drops below ds_min,
/// or max_steps points have been accepted. Throws DomainError if s0 is not
/// a converged solution.
PathRecord run(const StatePoint& s0, const ContinuationConfig& cfg, const NewtonConfig& ncfg = {},
               const BorderedConfig& bcfg = {}, const ContinuationHooks& hooks = {});

}  // namespace cgle

#pragma once

// Minimum-norm solution of underdetermined linear systems J z = b with
// three more unknowns than equations, via the bordered split
// [Js | Jr] and the two sub-problems
//   Js [M | c] = [Jr | b],   (I + M M^T) y = c,   z = (y, M^T y).

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cgle/gmres.hpp"
#include "cgle/system.hpp"

namespace cgle {

/// Matrix-free linear operator R^q -> R^p with q = p + 3.
class UnderdeterminedSystem {
 public:
  virtual ~UnderdeterminedSystem() = default;

  virtual Index equations() const = 0;
  virtual Index unknowns() const = 0;
  virtual RealVector apply(const RealVector& x) const = 0;
  /// Column j of J. Default: apply to the unit vector.
  virtual RealVector column(Index j) const;
  /// Approximate inverse of the leading p x p block, applied to a length-p vector.
  virtual RealVector precondition(const RealVector& r) const { return r; }
  /// Vectors spanning a space that contains (approximately) ker J.
  virtual std::vector<RealVector> kernel_candidates() const = 0;
  /// Dropped columns prescribed by the system itself, if it has a rule.
  virtual std::optional<std::array<Index, 3>> generator_columns() const { return std::nullopt; }
};

/// Jacobian of F at a fixed state; unknowns as in pack().
class CgleJacobian final : public UnderdeterminedSystem {
 public:
  explicit CgleJacobian(StatePoint s);

  Index equations() const override;
  Index unknowns() const override;
  RealVector apply(const RealVector& x) const override;
  RealVector precondition(const RealVector& r) const override;
  std::vector<RealVector> kernel_candidates() const override;
  std::optional<std::array<Index, 3>> generator_columns() const override;

  const StatePoint& state() const noexcept { return state_; }

 private:
  StatePoint state_;
};

/// Which three unknowns leave the square block Js.
struct ColumnPartition {
  std::array<Index, 3> dropped{};
  /// kept[pos] is the unknown placed at column pos of Js (length p).
  /// Kept coefficient columns stay at their own position; kept extra
  /// unknowns fill the vacated slots in increasing order.
  std::vector<Index> kept;
};

/// Orthonormal Rayleigh-Ritz estimate of a three-dimensional ker J: the
/// combinations of kernel_candidates() with the smallest ||J x||.
std::vector<RealVector> estimate_kernel(const UnderdeterminedSystem& sys);

ColumnPartition make_partition(Index p, Index q, std::array<Index, 3> dropped);

enum class PartitionRule {
  /// Rayleigh-Ritz estimate of ker J from kernel_candidates(), then
  /// pivoted QR on its transpose to pick the dropped unknowns.
  kernel_estimate,
  /// Largest entries of the torus generators (falls back to kernel_estimate
  /// for systems without generator_columns()).
  generator_entries,
};

ColumnPartition choose_partition(const UnderdeterminedSystem& sys, PartitionRule rule);

struct BorderedConfig {
  GmresConfig gmres;
  PartitionRule rule = PartitionRule::kernel_estimate;
  /// Solve the four Js systems concurrently.
  bool concurrent = true;
  /// Use this partition instead of applying `rule`.
  std::optional<ColumnPartition> partition;
};

struct StepReport {
  /// GMRES iterations of the three Jr solves and the right-hand-side solve.
  std::array<int, 4> js_iterations{};
  int b_iterations = 0;
  double step_norm = 0.0;
  bool success = false;
  std::string failure;
  ColumnPartition partition;

  int max_js_iterations() const;
};

struct SubproblemOne {
  /// Js^{-1} Jr, p x 3.
  Eigen::MatrixXd M;
  /// Js^{-1} b.
  Eigen::VectorXd c;
  std::array<GmresResult, 4> solves;
};

/// Solves Js [M | c] = [Jr | b] with preconditioned GMRES.
SubproblemOne solve_subproblem_one(const UnderdeterminedSystem& sys, const ColumnPartition& part,
                                   const RealVector& b, const GmresConfig& cfg, bool concurrent);

/// Solves (I + M M^T) y = c with unpreconditioned GMRES.
GmresResult solve_subproblem_two(const Eigen::MatrixXd& M, const Eigen::VectorXd& c,
                                 const GmresConfig& cfg);

/// Minimum-norm z with J z = b. On failure z is empty and report.failure says why.
std::pair<RealVector, StepReport> min_norm_solve(const UnderdeterminedSystem& sys, const RealVector& b,
                                                 const BorderedConfig& cfg);

/// min_norm_solve for the Jacobian of F at s.
std::pair<RealVector, StepReport> bordered_newton_step(const StatePoint& s, const RealVector& b,
                                                       const BorderedConfig& cfg = {});

}  // namespace cgle

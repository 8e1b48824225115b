#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cgle/bordered.hpp"
#include "cgle/system.hpp"

namespace cgle {

struct NewtonConfig {
  int max_iter = 10;
  double f_tol = 1e-7;
};

/// Nonlinear system G(x) = 0 with three more unknowns than equations.
class NewtonProblem {
 public:
  virtual ~NewtonProblem() = default;
  virtual RealVector residual(const RealVector& x) const = 0;
  virtual std::unique_ptr<UnderdeterminedSystem> linearize(const RealVector& x) const = 0;
  /// Default: ||G(x)||_2 <= f_tol.
  virtual bool accept(const RealVector& x, const RealVector& g, const NewtonConfig& cfg) const;
};

struct NewtonTrace {
  RealVector x;
  bool converged = false;
  /// ||G|| at the initial guess and after every step.
  std::vector<double> history;
  std::vector<StepReport> steps;
  std::string message;

  int iterations() const { return static_cast<int>(steps.size()); }
};

/// Full minimum-norm Newton steps x <- x + z, J(x) z = -G(x).
NewtonTrace newton_iterate(const NewtonProblem& problem, RealVector x0, const NewtonConfig& ncfg,
                           const BorderedConfig& bcfg);

struct NewtonResult {
  explicit NewtonResult(StatePoint s) : state(std::move(s)) {}

  StatePoint state;
  bool converged = false;
  std::vector<double> history;
  std::vector<StepReport> steps;
  std::string message;

  int iterations() const { return static_cast<int>(steps.size()); }
};

NewtonResult newton_solve(const StatePoint& s0, const NewtonConfig& ncfg = {},
                          const BorderedConfig& bcfg = {});

}  // namespace cgle

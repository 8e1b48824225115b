#pragma once

// Galerkin-truncated ODE system for the spatial Fourier coefficients a_m(t),
// its fourth-order exponential time differencing integrator, and the
// relative monodromy matrix of a relative periodic orbit.

#include <vector>

#include <Eigen/Core>

#include "cgle/system.hpp"

namespace cgle {

struct OdeState {
  /// Spatial truncation Nx; a holds modes m = -Nx/2+1 .. Nx/2-1 at index m + Nx/2 - 1.
  int nx = 0;
  std::vector<cplx> a;
  double t = 0.0;

  OdeState() = default;
  /// Zero state; throws DomainError unless nx is even and >= 8.
  explicit OdeState(int nx_);

  int m_max() const noexcept { return nx / 2 - 1; }
  cplx& operator()(int m) { return a[static_cast<std::size_t>(m + m_max())]; }
  const cplx& operator()(int m) const { return a[static_cast<std::size_t>(m + m_max())]; }
  double norm() const;
};

/// R a_m - k_m^2 (1 + i nu) a_m - (1 + i mu) (|A|^2 A)_m.
std::vector<cplx> ode_rhs(const OdeState& s, const Parameters& p);

/// ETDRK4 with `steps` fixed steps from s.t to s.t + t_span. Throws
/// SolverFailure if the coefficient norm exceeds 1e8.
OdeState integrate(const OdeState& s, const Parameters& p, double t_span, int steps);

/// a_m(0) = sum_n a_{m,n}.
OdeState initial_condition(const StatePoint& s);

/// Integrates a_m(0) over one period, applies a_m -> e^{i phi} e^{i k_m S} a_m
/// and returns the relative L2 distance to a_m(0).
double closure_residual(const StatePoint& s, int steps = 2048);

struct MonodromyResult {
  /// Sorted by decreasing magnitude.
  std::vector<cplx> eigenvalues;
  int unstable_dimension = 0;
  int unit_count = 0;
  /// Real 2(Nx-1) x 2(Nx-1) matrix on (Re a_m, Im a_m) pairs, m ascending.
  Eigen::MatrixXd matrix;
};

struct MonodromyConfig {
  int steps = 2048;
  /// |lambda| > 1 + unit_tol is unstable; ||lambda| - 1| <= unit_tol is unit.
  double unit_tol = 1e-6;
  /// Integrate the variational columns on concurrent workers.
  bool parallel = true;
};

MonodromyResult relative_monodromy(const StatePoint& s, const MonodromyConfig& cfg = {});

/// A = sqrt(R - k^2) e^{i(kx - omega t)}, omega = mu (R - k^2) + nu k^2, with the
/// given period and spatial shift. The time index n of the single mode is
/// chosen so that phi = omega T - k S + 2 pi n lies in [0, 2 pi). Throws
/// DomainError if R <= k^2 or the mode does not fit on the grid.
StatePoint plane_wave(int k, const Parameters& p, double T, double S, const Grid& grid);

}  // namespace cgle

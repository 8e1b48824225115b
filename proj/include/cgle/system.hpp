#pragma once

// The nonlinear algebraic system F(a, phi, S, T) = 0 whose zeros are
// relative time-periodic solutions A(x,t) = e^{i phi} A(x+S, t+T), and all
// Jacobian actions needed by the matrix-free Newton solver.
//
// Real unknown layout: (Re a_0, Im a_0, Re a_1, Im a_1, ..., phi, S, T) with
// coefficients in canonical grid order. Equations use the same interleaving.

#include <array>
#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "cgle/spectral.hpp"

namespace cgle {

using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Parameters {
  double R = 16.0;
  double nu = -7.0;
  double mu = 5.0;

  bool operator==(const Parameters&) const = default;
};

enum class Param { R, nu, mu };

double get(const Parameters& p, Param which);
void set(Parameters& p, Param which, double value);
std::string to_string(Param which);
/// Accepts "R", "nu", "mu"; throws DomainError otherwise.
Param parse_param(const std::string& name);

/// Generator (phi, S, T) of a subgroup of the isotropy subgroup.
struct GroupShift {
  double phi = 0.0;
  double S = 0.0;
  double T = 1.0;

  bool operator==(const GroupShift&) const = default;
};

struct StatePoint {
  SpectralField field;
  GroupShift shift;
  Parameters params;

  const Grid& grid() const noexcept { return field.grid(); }
};

/// 2 (Nx-1)(Nt-1).
inline Index equation_count(const Grid& g) { return 2 * static_cast<Index>(g.size()); }
/// 2 (Nx-1)(Nt-1) + 3.
inline Index unknown_count(const Grid& g) { return equation_count(g) + 3; }

/// Positions of phi, S, T in the unknown vector.
inline Index phi_index(const Grid& g) { return equation_count(g); }
inline Index s_index(const Grid& g) { return equation_count(g) + 1; }
inline Index t_index(const Grid& g) { return equation_count(g) + 2; }

RealVector pack(const StatePoint& s);
/// Inverse of pack; trailing entries beyond the first q are ignored.
StatePoint unpack(const RealVector& x, const Grid& grid, const Parameters& params);

RealVector field_to_real(const SpectralField& f);
SpectralField real_to_field(const RealVector& x, const Grid& grid);

/// Diagonal multiplier of the linear part for mode (m, n):
/// i(2 pi n - phi - k_m S)/T - R + k_m^2 (1 + i nu).
cplx linear_multiplier(const GroupShift& g, const Parameters& p, int m, int n);

/// F(s), length 2(Nx-1)(Nt-1). Throws DomainError for T <= 0 or non-finite input.
RealVector residual(const StatePoint& s);

/// J v for a full-length direction (coefficients, dphi, dS, dT).
RealVector jvp(const StatePoint& s, const RealVector& v);

/// dF/dR, dF/dnu or dF/dmu.
RealVector param_column(const StatePoint& s, Param which);

/// Infinitesimal generators of the torus action: (i a), (i m a), (i n a)
/// with zero (phi, S, T) entries.
std::array<RealVector, 3> kernel_generators(const StatePoint& s);

/// Applies the inverse of the block-diagonal linear-part Jacobian D_B.
/// Blocks whose multiplier magnitude falls below 1e-10 of the largest are
/// clamped to that magnitude before inversion.
RealVector precond_apply(const StatePoint& s, const RealVector& r);

/// Applies D_B itself (used by tests and by callers building Js products).
RealVector precond_forward(const StatePoint& s, const RealVector& x);

struct SwapColumns {
  std::array<Index, 3> columns{};
  /// True when a generator vanished and the choice fell back to |a| ranking.
  bool degenerate = false;
};

/// Three distinct coefficient columns to swap out of J_a: the largest entry
/// of v1, v2, v3 in turn, skipping already chosen indices. Throws DomainError
/// on a zero field.
SwapColumns select_swap_columns(const StatePoint& s);

}  // namespace cgle

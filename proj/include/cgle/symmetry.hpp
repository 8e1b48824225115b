#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cgle/system.hpp"

namespace cgle {

/// a_{m,n} -> e^{i alpha} e^{i m s} e^{i n tau} a_{m,n}.
SpectralField torus_act(const SpectralField& f, double alpha, double s, double tau);
StatePoint torus_act(const StatePoint& st, double alpha, double s, double tau);

/// Same orbit written with S + j Lx: a'_{m,n} = a_{m,n-jm}. Throws DomainError if a
/// coefficient above drop_tol * max|a| would leave the grid.
StatePoint shift_s_lattice(const StatePoint& st, int j, double drop_tol = 1e-10);
/// Same orbit written with phi + 2 pi j: a'_{m,n} = a_{m,n-j}.
StatePoint shift_phi_lattice(const StatePoint& st, int j, double drop_tol = 1e-10);

/// Spatial reflection x -> -x written as a solution with shift Lx - S:
/// a'_{m,n} = a_{-m,n-m}. Involution. Throws DomainError if a coefficient
/// above drop_tol * max|a| would leave the grid.
StatePoint conjugate(const StatePoint& st, double drop_tol = 1e-10);

/// Largest l in [2, Nx/2] whose modes outside m = -1 (mod l) carry at most
/// tol of the total power. Throws DomainError on a zero field.
std::optional<int> detect_l_symmetry(const SpectralField& f, double tol = 1e-6);

/// A(x,t) = e^{i phi} A(-x + c, t + T).
struct ReflectShift {
  double phi = 0.0;
  double c = 0.0;
  double T = 0.0;
};

struct SymmetryReport {
  std::optional<int> l_symmetry;
  /// Centers in [0, Lx/2); each symmetry repeats at center + Lx/2.
  std::optional<double> even_center;
  std::optional<double> odd_center;
  /// Reflection combined with a half-period time shift.
  std::optional<ReflectShift> reflect_shift;
  double tol = 1e-6;
};

/// Relative L2 mismatch of A(x,t) against e^{i phi} A(-x + c, t + dt), sampled
/// on [0, T) in the spatial Fourier basis.
double reflection_mismatch(const StatePoint& st, const ReflectShift& r);

/// Fills even_center, odd_center (only when S is within tol of 0 or Lx/2
/// modulo Lx) and reflect_shift with dt = T/2.
SymmetryReport detect_reflection(const StatePoint& st, double tol = 1e-6);

/// l symmetry plus reflections.
SymmetryReport classify(const StatePoint& st, double tol = 1e-6);

/// Compact label such as "l=2,even@pi/4,odd@0"; "none" when empty.
std::string format_flags(const SymmetryReport& r);

enum class OrbitVerdict { same_orbit, conjugate_orbits, distinct };
std::string to_string(OrbitVerdict v);

struct OrbitRelation {
  OrbitVerdict verdict = OrbitVerdict::distinct;
  /// (alpha, s, tau) with s2 = torus_act(s1, ...) (of conjugate(s2) for conjugate orbits),
  /// after both are written with matching phi and S.
  std::optional<std::array<double, 3>> element;
  /// Relative coefficient mismatch after the best alignment found.
  double mismatch = 0.0;
  std::string reason;
};

OrbitRelation same_orbit(const StatePoint& s1, const StatePoint& s2, double tol = 1e-6);

/// Greedy clustering of parameter points: a point joins the first existing
/// cluster whose representative lies closer than `threshold`.
int count_distinct(const std::vector<Parameters>& points, double threshold = 0.05);

}  // namespace cgle

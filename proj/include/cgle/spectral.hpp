#pragma once

// Truncated space-time Fourier representation of A(x, t).
//
// A field is stored by its coefficients a_{m,n}, m in [-Nx/2+1, Nx/2-1],
// n in [-Nt/2+1, Nt/2-1], m varying fastest. Time is kept in the scaled form
// theta = t/T, so the grid never depends on the period.
//
// Transform convention: to_physical is the unnormalized synthesis sum,
// to_spectral divides by Px*Pt.

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace cgle {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;
/// Spatial period. Fixed.
inline constexpr double kLx = kTwoPi;

class Grid {
 public:
  /// Throws DomainError unless nx, nt are even and >= 8.
  Grid(int nx, int nt);

  int nx() const noexcept { return nx_; }
  int nt() const noexcept { return nt_; }
  int m_max() const noexcept { return nx_ / 2 - 1; }
  int n_max() const noexcept { return nt_ / 2 - 1; }
  int modes_x() const noexcept { return nx_ - 1; }
  int modes_t() const noexcept { return nt_ - 1; }

  /// Number of retained complex modes, (Nx-1)(Nt-1).
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nx_ - 1) * static_cast<std::size_t>(nt_ - 1);
  }

  bool contains(int m, int n) const noexcept {
    return m >= -m_max() && m <= m_max() && n >= -n_max() && n <= n_max();
  }

  std::size_t index(int m, int n) const noexcept {
    return static_cast<std::size_t>(m + m_max()) +
           static_cast<std::size_t>(modes_x()) * static_cast<std::size_t>(n + n_max());
  }

  int m_of(std::size_t idx) const noexcept {
    return static_cast<int>(idx % static_cast<std::size_t>(modes_x())) - m_max();
  }
  int n_of(std::size_t idx) const noexcept {
    return static_cast<int>(idx / static_cast<std::size_t>(modes_x())) - n_max();
  }

  /// k_m = 2 pi m / Lx.
  static double wavenumber(int m) noexcept { return kTwoPi * m / kLx; }

  bool operator==(const Grid&) const = default;

 private:
  int nx_;
  int nt_;
};

class SpectralField {
 public:
  explicit SpectralField(const Grid& grid);
  SpectralField(const Grid& grid, std::vector<cplx> coef);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coef_.size(); }

  cplx& operator()(int m, int n) { return coef_[grid_.index(m, n)]; }
  const cplx& operator()(int m, int n) const { return coef_[grid_.index(m, n)]; }
  cplx& operator[](std::size_t i) { return coef_[i]; }
  const cplx& operator[](std::size_t i) const { return coef_[i]; }

  std::span<cplx> coef() noexcept { return coef_; }
  std::span<const cplx> coef() const noexcept { return coef_; }

  /// Euclidean norm of the coefficient vector.
  double norm() const;
  bool all_finite() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(cplx s);

 private:
  Grid grid_;
  std::vector<cplx> coef_;
};

/// Samples on the uniform (x, theta) grid; x varies fastest.
struct CollocationField {
  int px = 0;
  int pt = 0;
  std::vector<cplx> samples;

  CollocationField(int px_, int pt_);

  cplx& operator()(int j, int k) { return samples[static_cast<std::size_t>(k) * px + j]; }
  const cplx& operator()(int j, int k) const {
    return samples[static_cast<std::size_t>(k) * px + j];
  }
  static double x_at(int j, int px) { return kLx * j / px; }
  static double theta_at(int k, int pt) { return static_cast<double>(k) / pt; }
};

/// Synthesis on a px x pt grid. Requires px >= Nx, pt >= Nt, both even.
CollocationField to_physical(const SpectralField& f, int px, int pt);

/// Analysis onto the retained modes of `grid`; other modes are dropped.
SpectralField to_spectral(const CollocationField& c, const Grid& grid);

/// Retained-mode coefficients of A B conj(C), alias-free via 2x padding.
SpectralField cubic_conv(const SpectralField& a, const SpectralField& b, const SpectralField& c);

/// Same product evaluated on an explicit padded grid (used to check padding invariance).
SpectralField cubic_conv_padded(const SpectralField& a, const SpectralField& b,
                                const SpectralField& c, int px, int pt);

/// Padded collocation size used by every cubic Galerkin product.
inline std::pair<int, int> dealiased_size(const Grid& g) { return {2 * g.nx(), 2 * g.nt()}; }

struct PowerSpectra {
  std::vector<double> spatial;   ///< indexed by m + m_max
  std::vector<double> temporal;  ///< indexed by n + n_max
};

PowerSpectra power_spectra(const SpectralField& f);

/// Largest power in the outermost retained band (|m| = m_max for spatial,
/// |n| = n_max for temporal) relative to the peak of each spectrum; the
/// larger of the two ratios. Zero field gives 0.
double decay_ratio(const PowerSpectra& p);

}  // namespace cgle

#include "cgle/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "cgle/error.hpp"
#include "fft_plans.hpp"

namespace cgle {

Grid::Grid(int nx, int nt) : nx_(nx), nt_(nt) {
  if (nx < 8 || nt < 8 || nx % 2 != 0 || nt % 2 != 0) {
    throw DomainError("grid sizes must be even and >= 8 (got Nx=" + std::to_string(nx) +
                      ", Nt=" + std::to_string(nt) + ")");
  }
}

SpectralField::SpectralField(const Grid& grid) : grid_(grid), coef_(grid.size()) {}

SpectralField::SpectralField(const Grid& grid, std::vector<cplx> coef)
    : grid_(grid), coef_(std::move(coef)) {
  if (coef_.size() != grid_.size()) {
    throw DimensionError("coefficient count " + std::to_string(coef_.size()) +
                         " does not match grid size " + std::to_string(grid_.size()));
  }
}

double SpectralField::norm() const {
  double s = 0.0;
  for (const auto& c : coef_) s += std::norm(c);
  return std::sqrt(s);
}

bool SpectralField::all_finite() const {
  return std::all_of(coef_.begin(), coef_.end(),
                     [](const cplx& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (!(grid_ == other.grid_)) throw DimensionError("grid mismatch in field addition");
  for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += other.coef_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (!(grid_ == other.grid_)) throw DimensionError("grid mismatch in field subtraction");
  for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] -= other.coef_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx s) {
  for (auto& c : coef_) c *= s;
  return *this;
}

CollocationField::CollocationField(int px_, int pt_)
    : px(px_), pt(pt_), samples(static_cast<std::size_t>(px_) * static_cast<std::size_t>(pt_)) {}

namespace {

int wrap(int i, int p) { return i < 0 ? i + p : i; }

}  // namespace

CollocationField to_physical(const SpectralField& f, int px, int pt) {
  const Grid& g = f.grid();
  if (px < g.nx() || pt < g.nt() || px % 2 != 0 || pt % 2 != 0) {
    throw DimensionError("collocation grid " + std::to_string(px) + "x" + std::to_string(pt) +
                         " too small or odd for Nx=" + std::to_string(g.nx()) +
                         ", Nt=" + std::to_string(g.nt()));
  }
  std::vector<cplx> packed(static_cast<std::size_t>(px) * pt);
  for (int n = -g.n_max(); n <= g.n_max(); ++n) {
    const std::size_t row = static_cast<std::size_t>(wrap(n, pt)) * px;
    for (int m = -g.m_max(); m <= g.m_max(); ++m) packed[row + wrap(m, px)] = f(m, n);
  }
  CollocationField out(px, pt);
  detail::execute(detail::plans_2d(pt, px).backward, packed.data(), out.samples.data());
  return out;
}

SpectralField to_spectral(const CollocationField& c, const Grid& grid) {
  if (c.px < grid.nx() || c.pt < grid.nt()) {
    throw DimensionError("collocation grid smaller than spectral truncation");
  }
  std::vector<cplx> work(c.samples.size());
  detail::execute(detail::plans_2d(c.pt, c.px).forward, c.samples.data(), work.data());
  const double scale = 1.0 / (static_cast<double>(c.px) * c.pt);
  SpectralField f(grid);
  for (int n = -grid.n_max(); n <= grid.n_max(); ++n) {
    const std::size_t row = static_cast<std::size_t>(wrap(n, c.pt)) * c.px;
    for (int m = -grid.m_max(); m <= grid.m_max(); ++m) f(m, n) = work[row + wrap(m, c.px)] * scale;
  }
  return f;
}

SpectralField cubic_conv_padded(const SpectralField& a, const SpectralField& b,
                                const SpectralField& c, int px, int pt) {
  if (!(a.grid() == b.grid()) || !(a.grid() == c.grid())) {
    throw DimensionError("cubic_conv: grid mismatch");
  }
  const CollocationField pa = to_physical(a, px, pt);
  const CollocationField pb = &b == &a ? pa : to_physical(b, px, pt);
  const CollocationField pc = &c == &a ? pa : (&c == &b ? pb : to_physical(c, px, pt));
  CollocationField prod(px, pt);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(prod.samples.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    prod.samples[i] = pa.samples[i] * pb.samples[i] * std::conj(pc.samples[i]);
  }
  return to_spectral(prod, a.grid());
}

SpectralField cubic_conv(const SpectralField& a, const SpectralField& b, const SpectralField& c) {
  const auto [px, pt] = dealiased_size(a.grid());
  return cubic_conv_padded(a, b, c, px, pt);
}

PowerSpectra power_spectra(const SpectralField& f) {
  const Grid& g = f.grid();
  PowerSpectra p;
  p.spatial.assign(g.modes_x(), 0.0);
  p.temporal.assign(g.modes_t(), 0.0);
  for (int n = -g.n_max(); n <= g.n_max(); ++n) {
    for (int m = -g.m_max(); m <= g.m_max(); ++m) {
      const double w = std::norm(f(m, n));
      p.spatial[m + g.m_max()] += w;
      p.temporal[n + g.n_max()] += w;
    }
  }
  return p;
}

namespace {

double band_ratio(const std::vector<double>& s) {
  const double peak = *std::max_element(s.begin(), s.end());
  if (peak == 0.0) return 0.0;
  return std::max(s.front(), s.back()) / peak;
}

}  // namespace

double decay_ratio(const PowerSpectra& p) {
  return std::max(band_ratio(p.spatial), band_ratio(p.temporal));
}

}  // namespace cgle

#include "cgle/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <Eigen/Eigenvalues>

#include "cgle/error.hpp"
#include "fft_plans.hpp"

namespace cgle {

OdeState::OdeState(int nx_) : nx(nx_), a(static_cast<std::size_t>(nx_ > 0 ? nx_ - 1 : 0)) {
  if (nx_ < 8 || nx_ % 2 != 0) throw DomainError("OdeState: Nx must be even and >= 8");
}

double OdeState::norm() const {
  double s = 0.0;
  for (const auto& c : a) s += std::norm(c);
  return std::sqrt(s);
}

namespace {

using CVec = std::vector<cplx>;

/// Padded 1D synthesis/analysis pair for products of spatial coefficient vectors.
class Transform1d {
 public:
  explicit Transform1d(int nx) : mmax_(nx / 2 - 1), p_(2 * nx), plans_(detail::plans_1d(2 * nx)) {}

  int points() const { return p_; }

  void to_physical(const CVec& a, CVec& out) const {
    CVec packed(p_);
    for (int m = -mmax_; m <= mmax_; ++m) packed[m < 0 ? m + p_ : m] = a[m + mmax_];
    out.resize(p_);
    detail::execute(plans_.backward, packed.data(), out.data());
  }

  void to_modes(const CVec& phys, CVec& a) const {
    CVec work(p_);
    detail::execute(plans_.forward, phys.data(), work.data());
    a.resize(2 * mmax_ + 1);
    const double scale = 1.0 / p_;
    for (int m = -mmax_; m <= mmax_; ++m) a[m + mmax_] = work[m < 0 ? m + p_ : m] * scale;
  }

 private:
  int mmax_;
  int p_;
  const detail::FftPair& plans_;
};

CVec linear_symbols(int nx, const Parameters& p) {
  const int mmax = nx / 2 - 1;
  CVec L(static_cast<std::size_t>(nx - 1));
  for (int m = -mmax; m <= mmax; ++m) {
    const double k = Grid::wavenumber(m);
    L[m + mmax] = p.R - k * k * cplx(1.0, p.nu);
  }
  return L;
}

/// -(1 + i mu) (|A|^2 A)_m.
void nonlinear(const Transform1d& tr, const Parameters& p, const CVec& a, CVec& out) {
  CVec phys;
  tr.to_physical(a, phys);
  for (auto& v : phys) v = std::norm(v) * v;
  tr.to_modes(phys, out);
  const cplx f(-1.0, -p.mu);
  for (auto& v : out) v *= f;
}

/// -(1 + i mu) (A^2 V* + 2 |A|^2 V)_m.
void variational(const Transform1d& tr, const Parameters& p, const CVec& a, const CVec& v, CVec& out) {
  CVec pa, pv;
  tr.to_physical(a, pa);
  tr.to_physical(v, pv);
  for (std::size_t i = 0; i < pa.size(); ++i) pv[i] = pa[i] * pa[i] * std::conj(pv[i]) + 2.0 * std::norm(pa[i]) * pv[i];
  tr.to_modes(pv, out);
  const cplx f(-1.0, -p.mu);
  for (auto& x : out) x *= f;
}

struct EtdCoefficients {
  CVec E, E2, Q, f1, f2, f3;
};

/// Cox-Matthews coefficients evaluated by contour means (Kassam-Trefethen),
/// on a full circle since the symbols are complex.
EtdCoefficients etd_coefficients(const CVec& L, double h) {
  constexpr int kContour = 64;
  EtdCoefficients c;
  const std::size_t n = L.size();
  for (auto* v : {&c.E, &c.E2, &c.Q, &c.f1, &c.f2, &c.f3}) v->assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx hl = h * L[i];
    c.E[i] = std::exp(hl);
    c.E2[i] = std::exp(hl / 2.0);
    cplx q = 0.0, a = 0.0, b = 0.0, d = 0.0;
    for (int j = 0; j < kContour; ++j) {
      const cplx z = hl + std::polar(1.0, kPi * (j + 0.5) / (kContour / 2));
      const cplx ez = std::exp(z);
      const cplx z3 = z * z * z;
      q += (std::exp(z / 2.0) - 1.0) / z;
      a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      b += (2.0 + z + ez * (-2.0 + z)) / z3;
      d += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    c.Q[i] = h * q / double(kContour);
    c.f1[i] = h * a / double(kContour);
    c.f2[i] = h * b / double(kContour);
    c.f3[i] = h * d / double(kContour);
  }
  return c;
}

double vec_norm(const CVec& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

constexpr double kBlowUp = 1e8;

/// One ETDRK4 step of u' = L u + N(u) for a generic nonlinear term.
template <class NonlinearFn>
void etd_step(const EtdCoefficients& c, CVec& u, NonlinearFn&& nl) {
  const std::size_t n = u.size();
  CVec nu, na, nb, nc, a(n), b(n), cc(n);
  nl(u, nu);
  for (std::size_t i = 0; i < n; ++i) a[i] = c.E2[i] * u[i] + c.Q[i] * nu[i];
  nl(a, na);
  for (std::size_t i = 0; i < n; ++i) b[i] = c.E2[i] * u[i] + c.Q[i] * na[i];
  nl(b, nb);
  for (std::size_t i = 0; i < n; ++i) cc[i] = c.E2[i] * a[i] + c.Q[i] * (2.0 * nb[i] - nu[i]);
  nl(cc, nc);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = c.E[i] * u[i] + c.f1[i] * nu[i] + 2.0 * c.f2[i] * (na[i] + nb[i]) + c.f3[i] * nc[i];
  }
}

}  // namespace

std::vector<cplx> ode_rhs(const OdeState& s, const Parameters& p) {
  const Transform1d tr(s.nx);
  const CVec L = linear_symbols(s.nx, p);
  CVec out;
  nonlinear(tr, p, s.a, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += L[i] * s.a[i];
  return out;
}

OdeState integrate(const OdeState& s, const Parameters& p, double t_span, int steps) {
  if (steps < 1) throw DomainError("integrate: steps must be >= 1");
  if (!std::isfinite(t_span)) throw DomainError("integrate: non-finite time span");
  const Transform1d tr(s.nx);
  const EtdCoefficients c = etd_coefficients(linear_symbols(s.nx, p), t_span / steps);
  OdeState out = s;
  auto nl = [&](const CVec& u, CVec& r) { nonlinear(tr, p, u, r); };
  for (int k = 0; k < steps; ++k) {
    etd_step(c, out.a, nl);
    const double n = out.norm();
    if (!(n <= kBlowUp)) {
      throw SolverFailure("integrate: solution blew up at t=" + std::to_string(s.t + t_span * (k + 1) / steps));
    }
  }
  out.t = s.t + t_span;
  return out;
}

OdeState initial_condition(const StatePoint& s) {
  const Grid& g = s.grid();
  OdeState a0(g.nx());
  for (int m = -g.m_max(); m <= g.m_max(); ++m) {
    cplx sum = 0.0;
    for (int n = -g.n_max(); n <= g.n_max(); ++n) sum += s.field(m, n);
    a0(m) = sum;
  }
  return a0;
}

namespace {

cplx group_factor(const GroupShift& g, int m) { return std::polar(1.0, g.phi + Grid::wavenumber(m) * g.S); }

}  // namespace

double closure_residual(const StatePoint& s, int steps) {
  const OdeState a0 = initial_condition(s);
  const OdeState aT = integrate(a0, s.params, s.shift.T, steps);
  double err = 0.0;
  for (int m = -a0.m_max(); m <= a0.m_max(); ++m) err += std::norm(group_factor(s.shift, m) * aT(m) - a0(m));
  const double scale = a0.norm();
  return scale > 0.0 ? std::sqrt(err) / scale : std::sqrt(err);
}

MonodromyResult relative_monodromy(const StatePoint& s, const MonodromyConfig& cfg) {
  if (cfg.steps < 1) throw DomainError("relative_monodromy: steps must be >= 1");
  const Grid& g = s.grid();
  const int nx = g.nx();
  const int nm = g.modes_x();
  const int dim = 2 * nm;
  const OdeState a0 = initial_condition(s);
  const Transform1d tr(nx);
  const CVec L = linear_symbols(nx, s.params);
  const EtdCoefficients coef = etd_coefficients(L, s.shift.T / cfg.steps);

  MonodromyResult res;
  res.matrix.resize(dim, dim);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(dim));

  // Coupled (A, V) integration; column j starts from the real basis direction j.
  auto column = [&](int j) {
    try {
      CVec u(static_cast<std::size_t>(2 * nm));
      std::copy(a0.a.begin(), a0.a.end(), u.begin());
      u[nm + j / 2] = j % 2 == 0 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
      EtdCoefficients c2;
      for (auto [dst, src] : {std::pair{&c2.E, &coef.E}, {&c2.E2, &coef.E2}, {&c2.Q, &coef.Q}, {&c2.f1, &coef.f1},
                              {&c2.f2, &coef.f2}, {&c2.f3, &coef.f3}}) {
        dst->assign(src->begin(), src->end());
        dst->insert(dst->end(), src->begin(), src->end());
      }
      auto nl = [&](const CVec& w, CVec& r) {
        const CVec a(w.begin(), w.begin() + nm);
        const CVec v(w.begin() + nm, w.end());
        CVec ra, rv;
        nonlinear(tr, s.params, a, ra);
        variational(tr, s.params, a, v, rv);
        r = ra;
        r.insert(r.end(), rv.begin(), rv.end());
      };
      for (int k = 0; k < cfg.steps; ++k) {
        etd_step(c2, u, nl);
        if (!(vec_norm(u) <= kBlowUp)) throw SolverFailure("relative_monodromy: variational solution blew up");
      }
      for (int m = -g.m_max(); m <= g.m_max(); ++m) {
        const cplx v = group_factor(s.shift, m) * u[nm + m + g.m_max()];
        res.matrix(2 * (m + g.m_max()), j) = v.real();
        res.matrix(2 * (m + g.m_max()) + 1, j) = v.imag();
      }
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };
  if (cfg.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < dim; ++j) column(j);
  } else {
    for (int j = 0; j < dim; ++j) column(j);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(res.matrix, false);
  if (es.info() != Eigen::Success) throw SolverFailure("relative_monodromy: eigensolver failed");
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) res.eigenvalues.push_back(es.eigenvalues()[i]);
  std::stable_sort(res.eigenvalues.begin(), res.eigenvalues.end(),
                   [](const cplx& x, const cplx& y) { return std::abs(x) > std::abs(y); });
  for (const cplx& l : res.eigenvalues) {
    const double r = std::abs(l);
    if (r > 1.0 + cfg.unit_tol) ++res.unstable_dimension;
    if (std::abs(r - 1.0) <= cfg.unit_tol) ++res.unit_count;
  }
  return res;
}

StatePoint plane_wave(int k, const Parameters& p, double T, double S, const Grid& grid) {
  const double kk = Grid::wavenumber(k);
  const double amp2 = p.R - kk * kk;
  if (!(amp2 > 0.0)) throw DomainError("plane_wave: need R > k^2");
  if (!(T > 0.0) || !std::isfinite(T) || !std::isfinite(S)) throw DomainError("plane_wave: need finite T > 0 and S");
  const double omega = p.mu * amp2 + p.nu * kk * kk;
  const double raw = omega * T - kk * S;
  const double n = -std::floor(raw / kTwoPi);
  if (std::abs(n) > grid.n_max() || std::abs(k) > grid.m_max()) {
    throw DomainError("plane_wave: mode (" + std::to_string(k) + "," + std::to_string(static_cast<long>(n)) +
                      ") does not fit on the grid");
  }
  StatePoint s{SpectralField(grid), GroupShift{raw + kTwoPi * n, S, T}, p};
  s.field(k, static_cast<int>(n)) = std::sqrt(amp2);
  return s;
}

}  // namespace cgle

#include "cgle/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cgle/error.hpp"

namespace cgle {

double get(const Parameters& p, Param which) {
  switch (which) {
    case Param::R: return p.R;
    case Param::nu: return p.nu;
    case Param::mu: return p.mu;
  }
  return 0.0;
}

void set(Parameters& p, Param which, double value) {
  switch (which) {
    case Param::R: p.R = value; break;
    case Param::nu: p.nu = value; break;
    case Param::mu: p.mu = value; break;
  }
}

std::string to_string(Param which) {
  switch (which) {
    case Param::R: return "R";
    case Param::nu: return "nu";
    case Param::mu: return "mu";
  }
  return "?";
}

Param parse_param(const std::string& name) {
  if (name == "R") return Param::R;
  if (name == "nu") return Param::nu;
  if (name == "mu") return Param::mu;
  throw DomainError("unknown parameter '" + name + "' (expected R, nu or mu)");
}

RealVector field_to_real(const SpectralField& f) {
  RealVector x(2 * static_cast<Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    x[2 * i] = f[i].real();
    x[2 * i + 1] = f[i].imag();
  }
  return x;
}

SpectralField real_to_field(const RealVector& x, const Grid& grid) {
  if (x.size() < 2 * static_cast<Index>(grid.size())) {
    throw DimensionError("real vector too short for grid");
  }
  SpectralField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = cplx(x[2 * i], x[2 * i + 1]);
  return f;
}

RealVector pack(const StatePoint& s) {
  const Grid& g = s.grid();
  RealVector x(unknown_count(g));
  x.head(equation_count(g)) = field_to_real(s.field);
  x[phi_index(g)] = s.shift.phi;
  x[s_index(g)] = s.shift.S;
  x[t_index(g)] = s.shift.T;
  return x;
}

StatePoint unpack(const RealVector& x, const Grid& grid, const Parameters& params) {
  if (x.size() < unknown_count(grid)) throw DimensionError("unknown vector too short for grid");
  return StatePoint{real_to_field(x, grid),
                    GroupShift{x[phi_index(grid)], x[s_index(grid)], x[t_index(grid)]}, params};
}

cplx linear_multiplier(const GroupShift& g, const Parameters& p, int m, int n) {
  const double k = Grid::wavenumber(m);
  return cplx(0.0, (kTwoPi * n - g.phi - k * g.S) / g.T) - p.R + k * k * cplx(1.0, p.nu);
}

namespace {

void check_state(const StatePoint& s) {
  if (!(s.shift.T > 0.0)) throw DomainError("period T must be positive");
  if (!std::isfinite(s.shift.phi) || !std::isfinite(s.shift.S) || !std::isfinite(s.shift.T) ||
      !std::isfinite(s.params.R) || !std::isfinite(s.params.nu) || !std::isfinite(s.params.mu) ||
      !s.field.all_finite()) {
    throw DomainError("state contains non-finite values");
  }
}

void store(RealVector& out, std::size_t i, cplx v) {
  out[2 * i] = v.real();
  out[2 * i + 1] = v.imag();
}

}  // namespace

RealVector residual(const StatePoint& s) {
  check_state(s);
  const Grid& g = s.grid();
  const SpectralField nl = cubic_conv(s.field, s.field, s.field);
  const cplx nl_factor(1.0, s.params.mu);
  RealVector f(equation_count(g));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx c = linear_multiplier(s.shift, s.params, g.m_of(i), g.n_of(i));
    store(f, i, c * s.field[i] + nl_factor * nl[i]);
  }
  return f;
}

RealVector jvp(const StatePoint& s, const RealVector& v) {
  check_state(s);
  const Grid& g = s.grid();
  if (v.size() != unknown_count(g)) {
    throw DimensionError("jvp: direction has length " + std::to_string(v.size()) + ", expected " +
                         std::to_string(unknown_count(g)));
  }
  const SpectralField dv = real_to_field(v, g);
  const double dphi = v[phi_index(g)];
  const double ds = v[s_index(g)];
  const double dt = v[t_index(g)];
  const double T = s.shift.T;

  // Retained modes of A^2 V* + 2|A|^2 V.
  const auto [px, pt] = dealiased_size(g);
  const CollocationField pa = to_physical(s.field, px, pt);
  const CollocationField pv = to_physical(dv, px, pt);
  CollocationField prod(px, pt);
  const std::ptrdiff_t np = static_cast<std::ptrdiff_t>(prod.samples.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < np; ++i) {
    const cplx a = pa.samples[i];
    const cplx w = pv.samples[i];
    prod.samples[i] = a * a * std::conj(w) + 2.0 * std::norm(a) * w;
  }
  const SpectralField nl = to_spectral(prod, g);

  const cplx nl_factor(1.0, s.params.mu);
  const cplx I(0.0, 1.0);
  RealVector out(equation_count(g));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int m = g.m_of(i);
    const int n = g.n_of(i);
    const double k = Grid::wavenumber(m);
    const cplx a = s.field[i];
    cplx val = linear_multiplier(s.shift, s.params, m, n) * dv[i] + nl_factor * nl[i];
    val += -I * a * (dphi / T + k * ds / T + dt * (kTwoPi * n - s.shift.phi - k * s.shift.S) / (T * T));
    store(out, i, val);
  }
  return out;
}

RealVector param_column(const StatePoint& s, Param which) {
  check_state(s);
  const Grid& g = s.grid();
  RealVector out(equation_count(g));
  const cplx I(0.0, 1.0);
  switch (which) {
    case Param::R:
      for (std::size_t i = 0; i < g.size(); ++i) store(out, i, -s.field[i]);
      break;
    case Param::nu:
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double k = Grid::wavenumber(g.m_of(i));
        store(out, i, I * k * k * s.field[i]);
      }
      break;
    case Param::mu: {
      const SpectralField nl = cubic_conv(s.field, s.field, s.field);
      for (std::size_t i = 0; i < g.size(); ++i) store(out, i, I * nl[i]);
      break;
    }
  }
  return out;
}

std::array<RealVector, 3> kernel_generators(const StatePoint& s) {
  const Grid& g = s.grid();
  std::array<RealVector, 3> v;
  for (auto& x : v) x = RealVector::Zero(unknown_count(g));
  const cplx I(0.0, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx ia = I * s.field[i];
    store(v[0], i, ia);
    store(v[1], i, static_cast<double>(g.m_of(i)) * ia);
    store(v[2], i, static_cast<double>(g.n_of(i)) * ia);
  }
  return v;
}

namespace {

std::vector<cplx> clamped_multipliers(const StatePoint& s) {
  const Grid& g = s.grid();
  std::vector<cplx> c(g.size());
  double cmax = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    c[i] = linear_multiplier(s.shift, s.params, g.m_of(i), g.n_of(i));
    cmax = std::max(cmax, std::abs(c[i]));
  }
  const double floor = 1e-10 * cmax;
  for (auto& ci : c) {
    const double mag = std::abs(ci);
    if (mag < floor) ci = mag > 0.0 ? ci * (floor / mag) : cplx(floor, 0.0);
  }
  if (cmax == 0.0) std::fill(c.begin(), c.end(), cplx(1.0, 0.0));
  return c;
}

}  // namespace

RealVector precond_apply(const StatePoint& s, const RealVector& r) {
  const Grid& g = s.grid();
  if (r.size() < equation_count(g)) throw DimensionError("precond_apply: residual too short");
  const std::vector<cplx> c = clamped_multipliers(s);
  RealVector out = r;
  for (std::size_t i = 0; i < g.size(); ++i) store(out, i, cplx(r[2 * i], r[2 * i + 1]) / c[i]);
  return out;
}

RealVector precond_forward(const StatePoint& s, const RealVector& x) {
  const Grid& g = s.grid();
  if (x.size() < equation_count(g)) throw DimensionError("precond_forward: vector too short");
  const std::vector<cplx> c = clamped_multipliers(s);
  RealVector out = x;
  for (std::size_t i = 0; i < g.size(); ++i) store(out, i, c[i] * cplx(x[2 * i], x[2 * i + 1]));
  return out;
}

SwapColumns select_swap_columns(const StatePoint& s) {
  const Grid& g = s.grid();
  const Index ncoef = equation_count(g);
  const auto gens = kernel_generators(s);
  const RealVector a = field_to_real(s.field);
  const double amax = a.cwiseAbs().maxCoeff();
  if (amax == 0.0) throw DomainError("select_swap_columns: field is identically zero");

  SwapColumns out;
  std::vector<bool> taken(static_cast<std::size_t>(ncoef), false);
  auto argmax_free = [&](const RealVector& v) {
    Index best = -1;
    double best_val = -1.0;
    for (Index j = 0; j < ncoef; ++j) {
      if (taken[j]) continue;
      const double val = std::abs(v[j]);
      if (val > best_val) {
        best_val = val;
        best = j;
      }
    }
    return best;
  };
  for (int k = 0; k < 3; ++k) {
    const RealVector& v = gens[k];
    const double vmax = v.head(ncoef).cwiseAbs().maxCoeff();
    Index pick;
    if (vmax <= 1e-14 * amax) {
      out.degenerate = true;
      pick = argmax_free(a);
    } else {
      pick = argmax_free(v.head(ncoef));
    }
    out.columns[k] = pick;
    taken[pick] = true;
  }
  return out;
}

}  // namespace cgle

#include "cgle/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include <Eigen/Dense>

#include "cgle/error.hpp"

namespace cgle {

SpectralField torus_act(const SpectralField& f, double alpha, double s, double tau) {
  const Grid& g = f.grid();
  SpectralField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    out[i] = f[i] * std::polar(1.0, alpha + g.m_of(i) * s + g.n_of(i) * tau);
  }
  return out;
}

StatePoint torus_act(const StatePoint& st, double alpha, double s, double tau) {
  return StatePoint{torus_act(st.field, alpha, s, tau), st.shift, st.params};
}

namespace {

using IndexMap = std::function<std::pair<int, int>(int, int)>;

double max_abs(const SpectralField& f) {
  double m = 0.0;
  for (const auto& c : f.coef()) m = std::max(m, std::abs(c));
  return m;
}

SpectralField remap(const SpectralField& f, const IndexMap& to, double drop_tol, const char* what) {
  const Grid& g = f.grid();
  const double limit = drop_tol * max_abs(f);
  SpectralField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto [m, n] = to(g.m_of(i), g.n_of(i));
    if (g.contains(m, n)) {
      out(m, n) = f[i];
    } else if (std::abs(f[i]) > limit) {
      throw DomainError(std::string(what) + ": coefficient (" + std::to_string(g.m_of(i)) + "," +
                        std::to_string(g.n_of(i)) + ") would leave the truncated grid");
    }
  }
  return out;
}

double wrap_to(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  return r;
}

/// Distance between x and y modulo period.
double periodic_distance(double x, double y, double period) {
  const double d = wrap_to(x - y, period);
  return std::min(d, period - d);
}

}  // namespace

StatePoint shift_s_lattice(const StatePoint& st, int j, double drop_tol) {
  StatePoint out{remap(st.field, [j](int m, int n) { return std::pair{m, n + j * m}; }, drop_tol,
                       "shift_s_lattice"),
                 st.shift, st.params};
  out.shift.S += j * kLx;
  return out;
}

StatePoint shift_phi_lattice(const StatePoint& st, int j, double drop_tol) {
  StatePoint out{remap(st.field, [j](int m, int n) { return std::pair{m, n + j}; }, drop_tol,
                       "shift_phi_lattice"),
                 st.shift, st.params};
  out.shift.phi += j * kTwoPi;
  return out;
}

StatePoint conjugate(const StatePoint& st, double drop_tol) {
  StatePoint out{remap(st.field, [](int m, int n) { return std::pair{-m, n - m}; }, drop_tol, "conjugate"),
                 st.shift, st.params};
  out.shift.S = kLx - st.shift.S;
  return out;
}

std::optional<int> detect_l_symmetry(const SpectralField& f, double tol) {
  const Grid& g = f.grid();
  const PowerSpectra p = power_spectra(f);
  const double total = std::accumulate(p.spatial.begin(), p.spatial.end(), 0.0);
  if (total == 0.0) throw DomainError("detect_l_symmetry: field is identically zero");
  for (int l = g.nx() / 2; l >= 2; --l) {
    double off = 0.0;
    for (int m = -g.m_max(); m <= g.m_max(); ++m) {
      if (((m + 1) % l + l) % l != 0) off += p.spatial[m + g.m_max()];
    }
    if (off <= tol * total) return l;
  }
  return std::nullopt;
}

namespace {

/// Spatial Fourier coefficients a_m(t_k) at ns equispaced times in [0, T) shifted by dt,
/// stored row-major (k, m + m_max). With `reflect`, column m holds a_{-m}.
Eigen::MatrixXcd sample_modes(const StatePoint& st, int ns, double dt, bool reflect) {
  const Grid& g = st.grid();
  const double T = st.shift.T;
  Eigen::MatrixXcd out(ns, g.modes_x());
  for (int k = 0; k < ns; ++k) {
    const double t = T * k / ns + dt;
    for (int m = -g.m_max(); m <= g.m_max(); ++m) {
      const int src = reflect ? -m : m;
      cplx sum = 0.0;
      for (int n = -g.n_max(); n <= g.n_max(); ++n) sum += st.field(src, n) * std::polar(1.0, kTwoPi * n * t / T);
      out(k, m + g.m_max()) = sum * std::polar(1.0, -(st.shift.phi + Grid::wavenumber(src) * st.shift.S) * t / T);
    }
  }
  return out;
}

struct ReflectionData {
  Eigen::MatrixXcd P;
  Eigen::MatrixXcd Q;
  /// D_m = sum_k conj(P_km) Q_km.
  Eigen::VectorXcd D;
  double pp = 0.0;
  double qq = 0.0;
  int m_max = 0;
};

ReflectionData reflection_data(const StatePoint& st, double dt) {
  ReflectionData d;
  const int ns = 2 * st.grid().nt();
  d.P = sample_modes(st, ns, 0.0, false);
  d.Q = sample_modes(st, ns, dt, true);
  d.D = (d.P.conjugate().cwiseProduct(d.Q)).colwise().sum().transpose();
  d.pp = d.P.squaredNorm();
  d.qq = d.Q.squaredNorm();
  d.m_max = st.grid().m_max();
  return d;
}

/// z(c) = sum_m e^{-i m c} D_m = <P, e^{-imc} Q>.
cplx overlap(const ReflectionData& d, double c) {
  cplx z = 0.0;
  for (Eigen::Index i = 0; i < d.D.size(); ++i) {
    const int m = static_cast<int>(i) - d.m_max;
    z += std::polar(1.0, -m * c) * d.D[i];
  }
  return z;
}

double direct_mismatch(const ReflectionData& d, double phi, double c) {
  double err = 0.0;
  for (Eigen::Index i = 0; i < d.P.cols(); ++i) {
    const int m = static_cast<int>(i) - d.m_max;
    const cplx f = std::polar(1.0, phi - m * c);
    err += (d.P.col(i) - f * d.Q.col(i)).squaredNorm();
  }
  return d.pp > 0.0 ? std::sqrt(err / d.pp) : 0.0;
}

enum class PhaseMode { zero, pi, free };

/// Best c in [0, 2 pi) for the given phase rule, as (c, phi).
std::pair<double, double> best_reflection(const ReflectionData& d, PhaseMode mode, int grid_points) {
  auto score = [&](double c) {
    const cplx z = overlap(d, c);
    switch (mode) {
      case PhaseMode::zero: return -z.real();
      case PhaseMode::pi: return z.real();
      case PhaseMode::free: return -std::abs(z);
    }
    return 0.0;
  };
  const double h = kTwoPi / grid_points;
  double best_c = 0.0;
  double best = score(0.0);
  for (int j = 1; j < grid_points; ++j) {
    const double v = score(j * h);
    if (v < best) {
      best = v;
      best_c = j * h;
    }
  }
  // Golden-section refinement on the bracketing cell pair.
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = best_c - h;
  double b = best_c + h;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = score(x1);
  double f2 = score(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = score(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = score(x2);
    }
  }
  double c = 0.5 * (a + b);
  if (score(best_c) <= score(c)) c = best_c;
  c = wrap_to(c, kTwoPi);
  double phi = 0.0;
  if (mode == PhaseMode::pi) phi = kPi;
  if (mode == PhaseMode::free) phi = -std::arg(overlap(d, c));
  return {c, phi};
}

}  // namespace

double reflection_mismatch(const StatePoint& st, const ReflectShift& r) {
  const ReflectionData d = reflection_data(st, r.T);
  return direct_mismatch(d, r.phi, r.c);
}

SymmetryReport detect_reflection(const StatePoint& st, double tol) {
  SymmetryReport rep;
  rep.tol = tol;
  if (max_abs(st.field) == 0.0) return rep;
  const int grid_points = 4 * st.grid().nx();

  const double s_red = wrap_to(st.shift.S, kLx);
  const bool s_fixed = std::min(s_red, kLx - s_red) <= tol || std::abs(s_red - kLx / 2) <= tol;
  if (s_fixed) {
    const ReflectionData d = reflection_data(st, 0.0);
    const auto [ce, pe] = best_reflection(d, PhaseMode::zero, grid_points);
    if (direct_mismatch(d, pe, ce) <= tol) rep.even_center = wrap_to(ce / 2, kLx / 2);
    const auto [co, po] = best_reflection(d, PhaseMode::pi, grid_points);
    if (direct_mismatch(d, po, co) <= tol) rep.odd_center = wrap_to(co / 2, kLx / 2);
  }

  const ReflectionData d = reflection_data(st, st.shift.T / 2);
  const auto [c, phi] = best_reflection(d, PhaseMode::free, grid_points);
  if (direct_mismatch(d, phi, c) <= tol) rep.reflect_shift = ReflectShift{wrap_to(phi, kTwoPi), c, st.shift.T / 2};
  return rep;
}

SymmetryReport classify(const StatePoint& st, double tol) {
  SymmetryReport rep = detect_reflection(st, tol);
  if (max_abs(st.field) > 0.0) rep.l_symmetry = detect_l_symmetry(st.field, tol);
  return rep;
}

namespace {

std::string pretty_angle(double x) {
  if (std::abs(x) < 1e-6) return "0";
  for (int den : {1, 2, 3, 4, 6, 8}) {
    const double num = x / kPi * den;
    const double k = std::round(num);
    if (k != 0.0 && std::abs(num - k) < 1e-6) {
      std::string s = (k == 1.0 ? "" : std::to_string(static_cast<long>(k))) + "pi";
      if (den != 1) s += "/" + std::to_string(den);
      return s;
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

std::string format_flags(const SymmetryReport& r) {
  std::vector<std::string> parts;
  if (r.l_symmetry) parts.push_back("l=" + std::to_string(*r.l_symmetry));
  if (r.even_center) parts.push_back("even@" + pretty_angle(*r.even_center));
  if (r.odd_center) parts.push_back("odd@" + pretty_angle(*r.odd_center));
  if (r.reflect_shift) {
    parts.push_back("refl(" + pretty_angle(r.reflect_shift->phi) + ";" + pretty_angle(r.reflect_shift->c) +
                    ";T/2)");
  }
  if (parts.empty()) return "none";
  std::string out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out += "," + parts[i];
  return out;
}

std::string to_string(OrbitVerdict v) {
  switch (v) {
    case OrbitVerdict::same_orbit: return "same_orbit";
    case OrbitVerdict::conjugate_orbits: return "conjugate_orbits";
    case OrbitVerdict::distinct: return "distinct";
  }
  return "?";
}

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a)); }

struct Alignment {
  bool shifts_match = false;
  std::array<double, 3> element{};
  double mismatch = std::numeric_limits<double>::infinity();
  std::string reason;
};

double relative_mismatch(const SpectralField& a1, const SpectralField& a2, const std::array<double, 3>& g) {
  const SpectralField moved = torus_act(a1, g[0], g[1], g[2]);
  double err = 0.0;
  for (std::size_t i = 0; i < moved.size(); ++i) err += std::norm(a2[i] - moved[i]);
  const double scale = std::max(a1.norm(), a2.norm());
  return scale > 0.0 ? std::sqrt(err) / scale : 0.0;
}

/// Torus element mapping s1 onto s2, both with (phi, S, T) already matched.
Alignment align_fields(const SpectralField& a1, const SpectralField& a2) {
  Alignment best;
  best.shifts_match = true;
  const Grid& g = a1.grid();
  const double amax = std::max(max_abs(a1), max_abs(a2));
  if (amax == 0.0) {
    best.mismatch = 0.0;
    return best;
  }

  struct Mode {
    Eigen::Vector3d v;
    double theta;
    double weight;
  };
  std::vector<Mode> modes;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = std::min(std::abs(a1[i]), std::abs(a2[i]));
    if (w > 1e-6 * amax) {
      modes.push_back({Eigen::Vector3d(1.0, g.m_of(i), g.n_of(i)), std::arg(a2[i] / a1[i]), w});
    }
  }
  if (modes.empty()) {
    best.reason = "no common support";
    best.mismatch = relative_mismatch(a1, a2, {0.0, 0.0, 0.0});
    return best;
  }
  std::stable_sort(modes.begin(), modes.end(), [](const Mode& x, const Mode& y) { return x.weight > y.weight; });
  if (modes.size() > 16) modes.resize(16);

  Eigen::MatrixXd V(modes.size(), 3);
  for (std::size_t i = 0; i < modes.size(); ++i) V.row(i) = modes[i].v.transpose();
  if (Eigen::FullPivLU<Eigen::MatrixXd>(V).rank() < 3) {
    // Directions the support cannot resolve act trivially; fix them to zero.
    for (int u = 0; u < 3; ++u) modes.push_back({Eigen::Vector3d::Unit(u), 0.0, 0.0});
  }

  const std::size_t nm = modes.size();
  for (int target_det = 1; target_det <= 6; ++target_det) {
    for (std::size_t i = 0; i < nm; ++i) {
      for (std::size_t j = i + 1; j < nm; ++j) {
        for (std::size_t k = j + 1; k < nm; ++k) {
          Eigen::Matrix3d A;
          A << modes[i].v.transpose(), modes[j].v.transpose(), modes[k].v.transpose();
          const double det = A.determinant();
          if (std::lround(std::abs(det)) != target_det) continue;
          const Eigen::Matrix3d Ainv = A.inverse();
          const Eigen::Vector3d theta(modes[i].theta, modes[j].theta, modes[k].theta);
          for (int k0 = 0; k0 < target_det; ++k0) {
            for (int k1 = 0; k1 < target_det; ++k1) {
              for (int k2 = 0; k2 < target_det; ++k2) {
                const Eigen::Vector3d x = Ainv * (theta + kTwoPi * Eigen::Vector3d(k0, k1, k2));
                const std::array<double, 3> el{wrap_to(x[0], kTwoPi), wrap_to(x[1], kTwoPi), wrap_to(x[2], kTwoPi)};
                const double mis = relative_mismatch(a1, a2, el);
                if (mis < best.mismatch) {
                  best.mismatch = mis;
                  best.element = el;
                }
              }
            }
          }
        }
      }
    }
    if (best.mismatch < 1e-3) break;
  }
  return best;
}

/// Writes s2 with the lattice representative of (phi, S) closest to s1, then aligns.
Alignment align(const StatePoint& s1, const StatePoint& s2, double tol) {
  Alignment out;
  const Parameters& p1 = s1.params;
  const Parameters& p2 = s2.params;
  if (!close(p1.R, p2.R, tol) || !close(p1.nu, p2.nu, tol) || !close(p1.mu, p2.mu, tol)) {
    out.reason = "parameters differ";
    return out;
  }
  if (!close(s1.shift.T, s2.shift.T, tol)) {
    out.reason = "periods differ";
    return out;
  }
  if (periodic_distance(s1.shift.S, s2.shift.S, kLx) > tol * kLx ||
      periodic_distance(s1.shift.phi, s2.shift.phi, kTwoPi) > tol * kTwoPi) {
    out.reason = "shifts (phi, S) differ";
    return out;
  }
  const int jS = static_cast<int>(std::lround((s1.shift.S - s2.shift.S) / kLx));
  const int jphi = static_cast<int>(std::lround((s1.shift.phi - s2.shift.phi) / kTwoPi));
  StatePoint t2 = s2;
  try {
    if (jS != 0) t2 = shift_s_lattice(t2, jS, std::numeric_limits<double>::infinity());
    if (jphi != 0) t2 = shift_phi_lattice(t2, jphi, std::numeric_limits<double>::infinity());
  } catch (const DomainError& e) {
    out.reason = e.what();
    return out;
  }
  return align_fields(s1.field, t2.field);
}

}  // namespace

OrbitRelation same_orbit(const StatePoint& s1, const StatePoint& s2, double tol) {
  if (!(s1.grid() == s2.grid())) throw DimensionError("same_orbit: grid mismatch");
  OrbitRelation rel;
  const Alignment direct = align(s1, s2, tol);
  if (direct.shifts_match && direct.mismatch <= tol) {
    rel.verdict = OrbitVerdict::same_orbit;
    rel.element = direct.element;
    rel.mismatch = direct.mismatch;
    return rel;
  }
  Alignment mirrored;
  try {
    mirrored = align(s1, conjugate(s2, std::numeric_limits<double>::infinity()), tol);
  } catch (const DomainError& e) {
    mirrored.reason = e.what();
  }
  if (mirrored.shifts_match && mirrored.mismatch <= tol) {
    rel.verdict = OrbitVerdict::conjugate_orbits;
    rel.element = mirrored.element;
    rel.mismatch = mirrored.mismatch;
    return rel;
  }
  rel.verdict = OrbitVerdict::distinct;
  rel.mismatch = std::min(direct.mismatch, mirrored.mismatch);
  rel.reason = direct.shifts_match ? "no torus element aligns the coefficients" : direct.reason;
  return rel;
}

int count_distinct(const std::vector<Parameters>& points, double threshold) {
  std::vector<Parameters> reps;
  for (const Parameters& p : points) {
    const bool joined = std::any_of(reps.begin(), reps.end(), [&](const Parameters& r) {
      return std::hypot(p.R - r.R, p.nu - r.nu, p.mu - r.mu) < threshold;
    });
    if (!joined) reps.push_back(p);
  }
  return static_cast<int>(reps.size());
}

}  // namespace cgle

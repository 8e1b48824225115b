#include <cmath>

#include "cgle/continuation.hpp"
#include "cgle/dynamics.hpp"
#include "cgle/error.hpp"
#include "cgle/newton.hpp"
#include "cgle/symmetry.hpp"
#include "doctest.h"
#include "reference/reference.hpp"

using namespace cgle;

namespace {

const Parameters kP{16.0, -7.0, 5.0};

OdeState random_ode(int nx, std::uint64_t seed, double amplitude) {
  const SpectralField f = reference::random_field(Grid(nx, 8), seed, amplitude, 0.5);
  OdeState s(nx);
  for (int m = -s.m_max(); m <= s.m_max(); ++m) s(m) = f(m, 0);
  return s;
}

double distance(const OdeState& a, const OdeState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.a.size(); ++i) d += std::norm(a.a[i] - b.a[i]);
  return std::sqrt(d);
}

}  // namespace

TEST_CASE("ode state") {
  CHECK_THROWS_AS(OdeState(7), DomainError);
  OdeState s(8);
  CHECK(s.a.size() == 7u);
  s(-3) = 1.0;
  CHECK(s.a.front() == cplx(1.0));
  CHECK(s.norm() == 1.0);
}

TEST_CASE("right-hand side") {
  OdeState z(8);
  for (cplx v : ode_rhs(z, kP)) CHECK(v == cplx(0.0));

  OdeState s(8);
  s(0) = 4.0;
  const auto r = ode_rhs(s, kP);
  CHECK(std::abs(r[static_cast<std::size_t>(s.m_max())] - cplx(0.0, -80.0) * 4.0) <= 1e-12);

  const OdeState x = random_ode(8, 1, 1.0);
  const std::vector<cplx> cube = reference::direct_cubic_1d(x.a);
  const auto rx = ode_rhs(x, kP);
  for (int m = -x.m_max(); m <= x.m_max(); ++m) {
    const double k2 = static_cast<double>(m) * m;
    const std::size_t i = static_cast<std::size_t>(m + x.m_max());
    const cplx expect = kP.R * x(m) - k2 * cplx(1.0, kP.nu) * x(m) - cplx(1.0, kP.mu) * cube[i];
    CHECK(std::abs(rx[i] - expect) <= 1e-12 * (1.0 + std::abs(expect)));
  }
}

TEST_CASE("Stokes wave rotates at omega = mu R") {
  OdeState s(16);
  s(0) = 4.0;
  const OdeState e = integrate(s, kP, 0.05, 2048);
  CHECK(std::abs(e(0) - std::polar(4.0, -4.0)) <= 1e-10);
  CHECK(e.t == doctest::Approx(0.05));
  for (int m = 1; m <= e.m_max(); ++m) CHECK(std::abs(e(m)) <= 1e-14);
}

TEST_CASE("linear limit") {
  OdeState s(16);
  s(5) = 1e-8;
  const double t = 0.1;
  const OdeState e = integrate(s, kP, t, 50);
  const cplx expect = 1e-8 * std::exp(cplx(kP.R - 25.0, -kP.nu * 25.0) * t);
  CHECK(std::abs(e(5) - expect) <= 1e-6 * std::abs(expect));
}

TEST_CASE("fourth-order self-convergence") {
  const OdeState s = random_ode(16, 2, 0.5);
  const double t = 0.05;
  const OdeState a = integrate(s, kP, t, 8);
  const OdeState b = integrate(s, kP, t, 16);
  const OdeState c = integrate(s, kP, t, 32);
  const double ratio = distance(a, b) / distance(b, c);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("integration blow-up is reported") {
  OdeState s(16);
  for (cplx& v : s.a) v = 1e3;
  CHECK_THROWS_AS(integrate(s, kP, 1.0, 2), SolverFailure);
}

TEST_CASE("initial condition sums the temporal modes") {
  const Grid g(8, 8);
  const StatePoint st{reference::random_field(g, 3), GroupShift{0.1, 0.2, 0.3}, kP};
  const OdeState s = initial_condition(st);
  for (int m = -g.m_max(); m <= g.m_max(); ++m) {
    cplx sum = 0.0;
    for (int n = -g.n_max(); n <= g.n_max(); ++n) sum += st.field(m, n);
    CHECK(std::abs(s(m) - sum) <= 1e-14);
  }
}

TEST_CASE("closure residual") {
  const Grid g(16, 16);
  CHECK(closure_residual(plane_wave(1, kP, 0.1, 1.0, g)) <= 1e-10);
  CHECK(closure_residual(plane_wave(0, kP, 0.05, 0.0, g)) <= 1e-10);

  const StatePoint noisy = reference::add_noise(plane_wave(1, kP, 0.1, 1.0, g), 1e-2, 4);
  CHECK(closure_residual(noisy) > 1e-3);
  const NewtonResult r = newton_solve(noisy);
  REQUIRE(r.converged);
  CHECK(closure_residual(r.state) <= 1e-5);
}

TEST_CASE("plane-wave constructor") {
  const Grid g(16, 16);
  const StatePoint a = plane_wave(1, kP, 0.1, 1.0, g);
  CHECK(a.shift.phi == doctest::Approx(5.8).epsilon(1e-14));
  CHECK(std::abs(a.field(1, 0)) == doctest::Approx(std::sqrt(15.0)));
  CHECK(a.field.norm() == doctest::Approx(std::sqrt(15.0)));

  const StatePoint b = plane_wave(0, kP, 0.05, 2.0, g);
  CHECK(b.shift.phi == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(std::abs(b.field(0, 0)) == doctest::Approx(4.0));

  const StatePoint c = plane_wave(-2, kP, 0.3, 0.5, g);
  CHECK(c.shift.phi >= 0.0);
  CHECK(c.shift.phi < kTwoPi);
  CHECK(residual(c).norm() <= 1e-11);

  CHECK_THROWS_AS(plane_wave(4, kP, 0.1, 1.0, g), DomainError);
  CHECK_THROWS_AS(plane_wave(1, Parameters{1.0, -7.0, 5.0}, 0.1, 1.0, g), DomainError);
  CHECK_THROWS_AS(plane_wave(1, kP, 3.0, 1.0, g), DomainError);
}

TEST_CASE("Stokes-wave monodromy matches the sideband linearization") {
  const Grid g(16, 16);
  const double T = 0.05;
  const StatePoint s = plane_wave(0, kP, T, 0.0, g);
  const MonodromyResult r = relative_monodromy(s);
  CHECK(r.eigenvalues.size() == 30u);
  CHECK(r.matrix.rows() == 30);
  for (std::size_t i = 1; i < r.eigenvalues.size(); ++i) {
    CHECK(std::abs(r.eigenvalues[i - 1]) >= std::abs(r.eigenvalues[i]));
  }
  CHECK(r.unstable_dimension >= 1);
  CHECK(r.unit_count >= 1);
  CHECK(reference::multiset_distance(reference::stokes_multipliers(kP, T, 0.0, g.m_max()), r.eigenvalues) <=
        1e-4);

  const double S = 1.3;
  const MonodromyResult q = relative_monodromy(plane_wave(0, kP, T, S, g));
  CHECK(reference::multiset_distance(reference::stokes_multipliers(kP, T, S, g.m_max()), q.eigenvalues) <= 1e-4);
}

TEST_CASE("monodromy invariants") {
  const Grid g(16, 16);
  const StatePoint s = plane_wave(1, kP, 0.1, 1.0, g);
  MonodromyConfig serial;
  serial.parallel = false;
  const MonodromyResult a = relative_monodromy(s);
  const MonodromyResult b = relative_monodromy(s, serial);
  CHECK((a.matrix - b.matrix).norm() <= 1e-12 * a.matrix.norm());
  const MonodromyResult c = relative_monodromy(torus_act(s, 0.4, 0.9, 1.7));
  CHECK(c.unstable_dimension == a.unstable_dimension);
  CHECK(c.unit_count == a.unit_count);
  CHECK(a.unstable_dimension >= 1);
}

TEST_CASE("modulated-wave relative periodic orbit") {
  // Stable attractor of the Nx = 16 truncation at R = 2, period about 1.81, shift Lx/2.
  const Parameters p{2.0, -7.0, 5.0};
  const StatePoint guess = reference::attractor_rpo_guess(p, 16, 48, 400.0, 1.7, 1.9);
  CHECK(guess.shift.T == doctest::Approx(1.807).epsilon(1e-3));
  NewtonConfig ncfg;
  ncfg.f_tol = 1e-11;
  const NewtonResult r = newton_solve(guess, ncfg);
  REQUIRE(r.converged);
  CHECK(r.iterations() <= 4);
  const StatePoint& s = r.state;
  CHECK(std::abs(std::remainder(s.shift.S, kLx) - kLx / 2) <= 1e-6);
  CHECK(closure_residual(s, 8192) <= 1e-6);
  CHECK(decay_ratio(power_spectra(s.field)) <= 1e-6);

  // Time translation and the two torus directions give three neutral multipliers.
  MonodromyConfig mcfg;
  mcfg.steps = 8192;
  const MonodromyResult m = relative_monodromy(s, mcfg);
  CHECK(m.unit_count == 3);
  CHECK(m.unstable_dimension == 0);
  for (const RealVector& v : kernel_generators(s)) CHECK(jvp(s, v).norm() <= 1e-8 * v.norm());

  // A short continuation keeps every point a solution of the time-dependent problem.
  ContinuationConfig ccfg;
  ccfg.target = 2.1;
  const PathRecord path = run(s, ccfg, ncfg);
  CHECK(path.status == PathStatus::reached_target);
  CHECK(path.rejected == 0);
  for (const PathPoint& pt : path.points) CHECK(closure_residual(pt.state, 4096) <= 1e-5);
}

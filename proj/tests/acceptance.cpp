// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
// Usage: acceptance [--only N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cgle/bordered.hpp"
#include "cgle/continuation.hpp"
#include "cgle/dynamics.hpp"
#include "cgle/gmres.hpp"
#include "cgle/newton.hpp"
#include "cgle/symmetry.hpp"
#include "cgle/system.hpp"
#include "reference/reference.hpp"

using namespace cgle;

namespace {

// Pinned tolerances and limits.
constexpr double kC1ResidualTol = 1e-12;
constexpr double kC1Seconds = 1.0;
constexpr int kC2Directions = 20;
constexpr double kC2RelTol = 1e-6;
constexpr double kC2Seconds = 10.0;
constexpr double kC3RelTol = 1e-8;
constexpr double kC3Seconds = 30.0;
constexpr int kC4MaxBIterations = 4;
constexpr double kC5MaxRatio = 0.20;
constexpr double kC5Period = 0.05;
constexpr double kC5Seconds = 120.0;
constexpr double kC6Noise = 1e-3;
constexpr int kC6MaxIterations = 10;
constexpr int kC6TypicalIterations = 6;
constexpr double kC6ResidualTol = 1e-7;
constexpr double kC7AmplitudeTol = 1e-8;
constexpr double kC7Seconds = 120.0;
constexpr double kC8ClosureTol = 1e-5;
constexpr double kC9UnitTol = 1e-6;
constexpr int kC9MinUnit = 3;
constexpr double kC9MultiplierTol = 1e-4;
constexpr double kC9Seconds = 120.0;
constexpr double kC10AlignTol = 1e-8;

const Parameters kBase{16.0, -7.0, 5.0};

struct Outcome {
  bool pass = false;
  std::string detail;
};

/// Largest B-matrix iteration count over every bordered step taken in this process.
struct BTracker {
  int max_iterations = 0;
  long steps = 0;
  void add(const std::vector<StepReport>& reports) {
    for (const auto& r : reports) add(r);
  }
  void add(const StepReport& r) {
    max_iterations = std::max(max_iterations, r.b_iterations);
    ++steps;
  }
} g_b;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Outcome c1_analytic_residual() {
  const auto t0 = Clock::now();
  const StatePoint s = plane_wave(1, kBase, 0.1, 1.0, Grid(32, 32));
  const double r = residual(s).norm();
  const double t = seconds_since(t0);
  return {r <= kC1ResidualTol && t < kC1Seconds, "||F|| = " + fmt("%.3e", r) + ", " + fmt("%.3f", t) + " s"};
}

Outcome c2_jacobian() {
  const auto t0 = Clock::now();
  const Grid g(16, 16);
  const StatePoint s{reference::random_field(g, 7, 1.0, 0.4), GroupShift{0.3, 0.7, 0.4}, kBase};
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N(0.0, 1.0);
  double worst = 0.0;
  for (int d = 0; d < kC2Directions; ++d) {
    RealVector v(unknown_count(g));
    for (Index i = 0; i < v.size(); ++i) v[i] = N(rng);
    v /= v.norm();
    const RealVector jv = jvp(s, v);
    const RealVector fd = reference::fd_jvp(s, v, 1e-5);
    worst = std::max(worst, (jv - fd).norm() / jv.norm());
  }
  const double t = seconds_since(t0);
  return {worst <= kC2RelTol && t < kC2Seconds,
          "max relative error " + fmt("%.3e", worst) + " over " + std::to_string(kC2Directions) + " directions, " +
              fmt("%.2f", t) + " s"};
}

Outcome c3_min_norm() {
  const auto t0 = Clock::now();
  const Grid g(8, 8);
  const StatePoint s{reference::random_field(g, 3, 1.0, 0.3), GroupShift{0.9, 2.1, 0.3}, kBase};
  const RealVector b = -residual(s);
  auto [z, rep] = bordered_newton_step(s, b);
  g_b.add(rep);
  const Eigen::MatrixXd J = reference::dense_matrix(CgleJacobian(s));
  const Eigen::VectorXd zd = reference::dense_min_norm(J, b);
  const double err = rep.success ? (z - zd).norm() / zd.norm() : INFINITY;
  const double t = seconds_since(t0);
  return {err <= kC3RelTol && t < kC3Seconds,
          "relative difference to dense pseudoinverse " + fmt("%.3e", err) + ", B iterations " +
              std::to_string(rep.b_iterations) + ", " + fmt("%.2f", t) + " s"};
}

Outcome c4_b_matrix() {
  // Own workload so the criterion is meaningful when run alone; steps from other
  // criteria run in the same process are included as well.
  const Grid g(16, 16);
  for (std::uint64_t seed : {1u, 2u}) {
    const StatePoint s = reference::add_noise(plane_wave(1, kBase, 0.1, 1.0, g), 1e-3, seed);
    g_b.add(newton_solve(s).steps);
  }
  {
    const StatePoint s{reference::random_field(Grid(8, 8), 5, 1.0, 0.3), GroupShift{0.2, 0.4, 0.6}, kBase};
    g_b.add(bordered_newton_step(s, -residual(s)).second);
  }
  {
    ContinuationConfig cfg;
    cfg.target = 18.0;
    const PathRecord path = run(plane_wave(0, kBase, 0.05, 0.0, g), cfg, {}, {},
                                ContinuationHooks{nullptr, nullptr});
    (void)path;
  }
  return {g_b.max_iterations <= kC4MaxBIterations,
          "max B-matrix iterations " + std::to_string(g_b.max_iterations) + " over " + std::to_string(g_b.steps) +
              " bordered steps"};
}

Outcome c5_preconditioner() {
  const auto t0 = Clock::now();
  const Grid g(32, 32);
  const StatePoint s = reference::add_noise(plane_wave(1, kBase, kC5Period, 1.0, g), 1e-3, 21);
  const CgleJacobian jac(s);
  const ColumnPartition part = choose_partition(jac, PartitionRule::kernel_estimate);
  const Index p = jac.equations();
  const LinearOperator js = [&](const Eigen::VectorXd& y) {
    RealVector x = RealVector::Zero(jac.unknowns());
    for (Index pos = 0; pos < p; ++pos) x[part.kept[pos]] = y[pos];
    return jac.apply(x);
  };
  const RealVector b = -residual(s);
  GmresConfig cfg;
  cfg.max_iter = 4000;
  const GmresResult pre = gmres(js, b, cfg, [&](const Eigen::VectorXd& r) { return jac.precondition(r); });
  const GmresResult plain = gmres(js, b, cfg);
  const double ratio = static_cast<double>(pre.iterations) / plain.iterations;
  const double t = seconds_since(t0);
  return {pre.converged && plain.converged && ratio <= kC5MaxRatio && t < kC5Seconds,
          "preconditioned " + std::to_string(pre.iterations) + " vs unpreconditioned " +
              std::to_string(plain.iterations) + " iterations (ratio " + fmt("%.4f", ratio) + ", p = " +
              std::to_string(p) + "), " + fmt("%.1f", t) + " s"};
}

Outcome c6_newton() {
  const Grid g(32, 32);
  int worst = 0;
  int typical = 0;
  double worst_res = 0.0;
  bool all = true;
  std::ostringstream its;
  const int trials = 3;
  for (int k = 0; k < trials; ++k) {
    const StatePoint s = reference::add_noise(plane_wave(k % 2, kBase, 0.1, 1.0, g), kC6Noise, 100 + k);
    const NewtonResult r = newton_solve(s);
    g_b.add(r.steps);
    all = all && r.converged && r.history.back() <= kC6ResidualTol && r.iterations() <= kC6MaxIterations;
    worst = std::max(worst, r.iterations());
    worst_res = std::max(worst_res, r.history.back());
    if (r.iterations() <= kC6TypicalIterations) ++typical;
    its << (k ? "," : "") << r.iterations();
  }
  return {all && typical == trials, "iterations [" + its.str() + "], max final ||F|| " + fmt("%.3e", worst_res)};
}

struct BranchRun {
  bool done = false;
  PathRecord path;
  double seconds = 0.0;
};
BranchRun g_branch;

const BranchRun& k0_branch() {
  if (!g_branch.done) {
    const auto t0 = Clock::now();
    ContinuationConfig cfg;
    cfg.param = Param::R;
    cfg.target = 25.0;
    g_branch.path = run(plane_wave(0, kBase, 0.05, 0.0, Grid(32, 32)), cfg);
    g_branch.seconds = seconds_since(t0);
    g_branch.done = true;
  }
  return g_branch;
}

Outcome c7_continuation() {
  const BranchRun& br = k0_branch();
  double worst = 0.0;
  for (const auto& pt : br.path.points) worst = std::max(worst, std::abs(pt.state.field.norm() - std::sqrt(pt.lambda)));
  const auto& last = br.path.points.back();
  const bool ok = br.path.status == PathStatus::reached_target && br.path.rejected == 0 && last.lambda == 25.0 &&
                  worst <= kC7AmplitudeTol && br.seconds < kC7Seconds;
  return {ok, std::to_string(br.path.points.size()) + " points, " + std::to_string(br.path.rejected) +
                  " rejected, max |amplitude - sqrt(R)| " + fmt("%.3e", worst) + ", final R " +
                  fmt("%.17g", last.lambda) + ", " + fmt("%.2f", br.seconds) + " s"};
}

Outcome c8_closure() {
  const BranchRun& br = k0_branch();
  double worst = 0.0;
  for (const auto& pt : br.path.points) worst = std::max(worst, closure_residual(pt.state));
  return {worst <= kC8ClosureTol,
          "max closure residual " + fmt("%.3e", worst) + " over " + std::to_string(br.path.points.size()) + " points"};
}

Outcome c9_monodromy() {
  const auto t0 = Clock::now();
  const Grid g(32, 32);
  const double T = 0.05, S = 0.0;
  const StatePoint s = plane_wave(0, kBase, T, S, g);
  MonodromyConfig cfg;
  cfg.unit_tol = kC9UnitTol;
  const MonodromyResult r = relative_monodromy(s, cfg);
  const double dist = reference::multiset_distance(reference::stokes_multipliers(kBase, T, S, g.m_max()), r.eigenvalues);
  const double t = seconds_since(t0);
  const bool unstable = r.unstable_dimension >= 1;
  const bool unit = r.unit_count >= kC9MinUnit;
  const bool match = dist <= kC9MultiplierTol;
  std::ostringstream os;
  os << "unstable_dimension " << r.unstable_dimension << (unstable ? " (ok)" : " (too small)") << ", unit count "
     << r.unit_count << (unit ? " (ok)" : " (< 3: the k=0 Stokes wave has a single continuous symmetry direction)")
     << ", sideband mismatch " << fmt("%.3e", dist) << (match ? " (ok)" : " (too large)") << ", " << fmt("%.1f", t)
     << " s";
  return {unstable && unit && match && t < kC9Seconds, os.str()};
}

SpectralField diamond_field(const Grid& g, std::uint64_t seed) {
  SpectralField f = reference::random_field(g, seed, 1.0, 0.3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(g.m_of(i)) + std::abs(g.n_of(i)) > g.n_max()) f[i] = 0.0;
  }
  return f;
}

SpectralField support_field(const Grid& g, const std::vector<int>& ms) {
  SpectralField f(g);
  for (int m : ms) {
    for (int n = -2; n <= 2; ++n) f(m, n) = cplx(1.0 + 0.1 * m, 0.3 * n + 0.05);
  }
  return f;
}

double lattice_distance(double x, double y) {
  const double d = std::remainder(x - y, kTwoPi);
  return std::abs(d);
}

Outcome c10_symmetry() {
  const Grid g(16, 16);
  std::ostringstream os;
  bool ok = true;

  const StatePoint s{diamond_field(g, 9), GroupShift{1.3, 4.0, 0.7}, kBase};
  const StatePoint cc = conjugate(conjugate(s));
  bool exact = cc.shift == s.shift;
  for (std::size_t i = 0; i < g.size(); ++i) exact = exact && cc.field[i] == s.field[i];
  ok = ok && exact;
  os << "conjugate^2 " << (exact ? "exact" : "NOT exact");

  const auto l2 = detect_l_symmetry(support_field(g, {-1, 1, 3}));
  const auto l3 = detect_l_symmetry(support_field(g, {-1, 2, 5}));
  const bool lok = l2 == 2 && l3 == 3;
  ok = ok && lok;
  os << "; l: {-1,1,3}->" << (l2 ? std::to_string(*l2) : "none") << " {-1,2,5}->" << (l3 ? std::to_string(*l3) : "none");

  const StatePoint r{reference::random_field(g, 4, 1.0, 0.3), GroupShift{0.5, 2.0, 0.8}, kBase};
  const OrbitRelation rel = same_orbit(r, torus_act(r, 0.7, 1.1, 2.2));
  double el = INFINITY;
  if (rel.element) {
    el = std::max({lattice_distance((*rel.element)[0], 0.7), lattice_distance((*rel.element)[1], 1.1),
                   lattice_distance((*rel.element)[2], 2.2)});
  }
  const bool aok = rel.verdict == OrbitVerdict::same_orbit && el <= kC10AlignTol;
  ok = ok && aok;
  os << "; torus element error " << fmt("%.2e", el);

  const int one = count_distinct({kBase, Parameters{16.04, -7.0, 5.0}});
  const int two = count_distinct({kBase, Parameters{16.1, -7.0, 5.0}});
  const int zero = count_distinct({});
  const bool cok = one == 1 && two == 2 && zero == 0;
  ok = ok && cok;
  os << "; count_distinct " << one << "," << two << "," << zero;
  return {ok, os.str()};
}

Outcome c11_counts() {
  const Index a = unknown_count(Grid(48, 48));
  const Index b = unknown_count(Grid(128, 128));
  return {a == 4421 && b == 32261, "Nx=Nt=48: " + std::to_string(a) + ", Nx=Nt=128: " + std::to_string(b)};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"analytic plane-wave residual", c1_analytic_residual},
      {"Jacobian vs central differences", c2_jacobian},
      {"minimum-norm step vs dense pseudoinverse", c3_min_norm},
      {"B-matrix iteration bound", c4_b_matrix},
      {"block-diagonal preconditioner effect", c5_preconditioner},
      {"Newton from perturbed plane wave", c6_newton},
      {"continuation along the k=0 branch", c7_continuation},
      {"closure by time integration", c8_closure},
      {"Stokes-wave relative monodromy", c9_monodromy},
      {"symmetry tools", c10_symmetry},
      {"unknown-count bookkeeping", c11_counts},
  };
  // Criterion 4 aggregates steps from the others, so it is evaluated last.
  std::vector<int> order;
  for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) {
    if (i != 4) order.push_back(i);
  }
  order.push_back(4);

  std::vector<std::string> lines(criteria.size() + 1);
  int failures = 0;
  for (int id : order) {
    if (only != 0 && id != only) continue;
    Outcome o;
    try {
      o = criteria[id - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    char head[96];
    std::snprintf(head, sizeof head, "%s C%-2d %s: ", o.pass ? "PASS" : "FAIL", id, criteria[id - 1].first);
    lines[id] = head + o.detail;
  }
  for (const auto& l : lines) {
    if (!l.empty()) std::printf("%s\n", l.c_str());
  }
  return failures == 0 ? 0 : 1;
}

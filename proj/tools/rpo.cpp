// Command-line front end: refine, continue and analyse relative periodic orbits.
//
// Exit codes: 0 success, 1 other error, 2 parse error, 3 no convergence, 4 stall.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "cgle/continuation.hpp"
#include "cgle/dynamics.hpp"
#include "cgle/error.hpp"
#include "cgle/io.hpp"
#include "cgle/newton.hpp"
#include "cgle/symmetry.hpp"

namespace fs = std::filesystem;
using namespace cgle;

namespace {

enum Exit { kOk = 0, kError = 1, kParse = 2, kNoConvergence = 3, kStall = 4 };

/// An input file that could not be opened; reported like a parse failure.
struct InputError : Error {
  using Error::Error;
};

StatePoint load_input(const std::string& file) {
  try {
    return load_solution(file);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), file + ": " + std::string(e.what()).substr(std::string(e.what()).find(':') + 2));
  } catch (const Error& e) {
    throw InputError(e.what());
  }
}

struct SolverOptions {
  double newton_tol = 1e-7;
  int newton_maxit = 10;
  double gmres_tol = 1e-9;
  int gmres_maxit = 3000;

  void add_to(CLI::App* app) {
    app->add_option("--newton-tol", newton_tol, "Residual norm accepted by Newton")->capture_default_str();
    app->add_option("--newton-maxit", newton_maxit, "Newton iteration limit")->capture_default_str();
    app->add_option("--gmres-tol", gmres_tol, "Relative GMRES residual tolerance")->capture_default_str();
    app->add_option("--gmres-maxit", gmres_maxit, "GMRES iteration limit")->capture_default_str();
  }
  NewtonConfig newton() const { return NewtonConfig{newton_maxit, newton_tol}; }
  BorderedConfig bordered() const {
    BorderedConfig b;
    b.gmres.tol = gmres_tol;
    b.gmres.max_iter = gmres_maxit;
    return b;
  }
};

void print_history(const std::vector<double>& history) {
  for (std::size_t i = 0; i < history.size(); ++i) {
    std::fprintf(stderr, "newton %zu residual %.6e\n", i, history[i]);
  }
}

int cmd_planewave(int k, const Parameters& p, double T, double S, int nx, int nt, const std::string& output) {
  const StatePoint s = plane_wave(k, p, T, S, Grid(nx, nt));
  save_solution(output, s);
  std::printf("phi %s\nresidual %.6e\n", format_real(s.shift.phi).c_str(), residual(s).norm());
  return kOk;
}

int cmd_refine(const std::string& input, const std::string& output, const SolverOptions& opt) {
  const StatePoint s0 = load_input(input);
  const NewtonResult r = newton_solve(s0, opt.newton(), opt.bordered());
  print_history(r.history);
  if (!r.converged) {
    std::fprintf(stderr, "error: %s\n", r.message.c_str());
    return kNoConvergence;
  }
  save_solution(output, r.state);
  int bmax = 0;
  for (const auto& st : r.steps) bmax = std::max(bmax, st.b_iterations);
  std::printf("iterations %d\nresidual %.6e\nb_matrix_max_iterations %d\n", r.iterations(), r.history.back(), bmax);
  return kOk;
}

struct ContinueOptions {
  std::string input;
  std::string param = "R";
  double target = 0.0;
  std::string out_dir;
  ContinuationConfig cfg;
};

int cmd_continue(ContinueOptions o, const SolverOptions& opt) {
  const StatePoint s0 = load_input(o.input);
  o.cfg.param = parse_param(o.param);
  o.cfg.target = o.target;
  o.cfg.ds_min = std::min(o.cfg.ds_min, o.cfg.ds_max);
  o.cfg.ds0 = std::clamp(o.cfg.ds0, o.cfg.ds_min, o.cfg.ds_max);
  const double f0 = residual(s0).norm();
  if (!(f0 <= opt.newton_tol)) {
    std::fprintf(stderr, "error: input is not converged (residual %.6e); run 'refine' first\n", f0);
    return kNoConvergence;
  }
  fs::create_directories(o.out_dir);
  PathCsvWriter csv(fs::path(o.out_dir) / "path.csv");
  ContinuationHooks hooks;
  hooks.classify = [](const StatePoint& s) { return format_flags(classify(s)); };
  hooks.on_accept = [&](const PathPoint& pt) {
    char name[32];
    std::snprintf(name, sizeof name, "step_%05d.rpo", pt.step);
    save_solution(fs::path(o.out_dir) / name, pt.state);
    csv.append(pt, o.cfg.param, name);
    std::fprintf(stderr, "step %d %s=%.10g ds=%.3g newton=%d gmres_max=%d residual=%.3e [%s]\n", pt.step,
                 o.param.c_str(), pt.lambda, pt.ds, pt.newton_iterations, pt.max_gmres_iterations,
                 pt.residual_norm, pt.symmetry.c_str());
  };
  const PathRecord path = run(s0, o.cfg, opt.newton(), opt.bordered(), hooks);
  std::printf("status %s\naccepted %zu\nrejected %d\n", to_string(path.status).c_str(), path.points.size(),
              path.rejected);
  if (path.status != PathStatus::reached_target) {
    std::fprintf(stderr, "stall: %s\n", path.message.c_str());
    return kStall;
  }
  return kOk;
}

int cmd_classify(const std::string& file, double tol) {
  const StatePoint s = load_input(file);
  const SymmetryReport r = classify(s, tol);
  std::printf("flags %s\n", format_flags(r).c_str());
  if (r.l_symmetry) std::printf("l_symmetry %d\n", *r.l_symmetry);
  if (r.even_center) std::printf("even_center %s\n", format_real(*r.even_center).c_str());
  if (r.odd_center) std::printf("odd_center %s\n", format_real(*r.odd_center).c_str());
  if (r.reflect_shift) {
    std::printf("reflect_shift %s %s %s\n", format_real(r.reflect_shift->phi).c_str(),
                format_real(r.reflect_shift->c).c_str(), format_real(r.reflect_shift->T).c_str());
  }
  return kOk;
}

int cmd_monodromy(const std::string& file, int steps) {
  const StatePoint s = load_input(file);
  MonodromyConfig cfg;
  cfg.steps = steps;
  const MonodromyResult r = relative_monodromy(s, cfg);
  std::printf("unstable_dimension %d\nunit_count %d\n", r.unstable_dimension, r.unit_count);
  for (const cplx& l : r.eigenvalues) {
    std::printf("eigenvalue %s %s %s\n", format_real(l.real()).c_str(), format_real(l.imag()).c_str(),
                format_real(std::abs(l)).c_str());
  }
  return kOk;
}

int cmd_integrate(const std::string& file, int steps) {
  const StatePoint s = load_input(file);
  std::printf("closure_residual %.6e\n", closure_residual(s, steps));
  return kOk;
}

int cmd_spectrum(const std::string& file) {
  const StatePoint s = load_input(file);
  const PowerSpectra p = power_spectra(s.field);
  const Grid& g = s.grid();
  std::printf("axis,index,power\n");
  for (int m = -g.m_max(); m <= g.m_max(); ++m) {
    std::printf("x,%d,%s\n", m, format_real(p.spatial[m + g.m_max()]).c_str());
  }
  for (int n = -g.n_max(); n <= g.n_max(); ++n) {
    std::printf("t,%d,%s\n", n, format_real(p.temporal[n + g.n_max()]).c_str());
  }
  std::fprintf(stderr, "decay_ratio %.6e\n", decay_ratio(p));
  return kOk;
}

int cmd_orbit_compare(const std::string& a, const std::string& b, double tol) {
  const StatePoint s1 = load_input(a);
  const StatePoint s2 = load_input(b);
  const OrbitRelation r = same_orbit(s1, s2, tol);
  std::printf("verdict %s\n", to_string(r.verdict).c_str());
  if (r.element) {
    std::printf("element %s %s %s\n", format_real((*r.element)[0]).c_str(), format_real((*r.element)[1]).c_str(),
                format_real((*r.element)[2]).c_str());
  }
  std::printf("mismatch %.6e\n", r.mismatch);
  if (!r.reason.empty()) std::fprintf(stderr, "reason: %s\n", r.reason.c_str());
  return kOk;
}

std::optional<int> threads_from_env() {
  const char* env = std::getenv("RPO_THREADS");
  if (env == nullptr || *env == '\0') return std::nullopt;
  try {
    const int n = std::stoi(env);
    if (n >= 1) return n;
  } catch (const std::exception&) {
  }
  std::fprintf(stderr, "warning: ignoring invalid RPO_THREADS='%s'\n", env);
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relative periodic orbits of the cubic complex Ginzburg-Landau equation"};
  app.require_subcommand(1);
  std::optional<int> threads;
  app.add_option("--threads", threads, "Worker threads (default: RPO_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  SolverOptions solver;
  std::function<int()> action;

  auto* pw = app.add_subcommand("planewave", "Write an exact plane-wave solution");
  int pw_k = 0, pw_nx = 32, pw_nt = 32;
  Parameters pw_p;
  double pw_T = 0.05, pw_S = 0.0;
  std::string pw_out;
  pw->add_option("--k", pw_k, "Wavenumber")->capture_default_str();
  pw->add_option("--R", pw_p.R)->capture_default_str();
  pw->add_option("--nu", pw_p.nu)->capture_default_str();
  pw->add_option("--mu", pw_p.mu)->capture_default_str();
  pw->add_option("--T", pw_T, "Period")->capture_default_str();
  pw->add_option("--S", pw_S, "Spatial shift")->capture_default_str();
  pw->add_option("--nx", pw_nx)->capture_default_str();
  pw->add_option("--nt", pw_nt)->capture_default_str();
  pw->add_option("--output", pw_out)->required();
  pw->callback([&] { action = [&] { return cmd_planewave(pw_k, pw_p, pw_T, pw_S, pw_nx, pw_nt, pw_out); }; });

  auto* refine = app.add_subcommand("refine", "Newton-refine a solution file");
  std::string rf_in, rf_out;
  refine->add_option("--input", rf_in)->required();
  refine->add_option("--output", rf_out)->required();
  solver.add_to(refine);
  refine->callback([&] { action = [&] { return cmd_refine(rf_in, rf_out, solver); }; });

  auto* cont = app.add_subcommand("continue", "Pseudo-arclength continuation in one parameter");
  ContinueOptions co;
  cont->add_option("--input", co.input)->required();
  cont->add_option("--param", co.param, "R, nu or mu")->check(CLI::IsMember({"R", "nu", "mu"}))->required();
  cont->add_option("--target", co.target)->required();
  cont->add_option("--out-dir", co.out_dir)->required();
  cont->add_option("--ds0", co.cfg.ds0)->capture_default_str();
  cont->add_option("--ds-max", co.cfg.ds_max)->capture_default_str();
  cont->add_option("--ds-min", co.cfg.ds_min)->capture_default_str();
  cont->add_option("--max-steps", co.cfg.max_steps)->capture_default_str();
  solver.add_to(cont);
  cont->callback([&] { action = [&] { return cmd_continue(co, solver); }; });

  double sym_tol = 1e-6;
  std::string file1, file2;
  auto* cls = app.add_subcommand("classify", "Report additional symmetries");
  cls->add_option("file", file1)->required();
  cls->add_option("--tol", sym_tol)->capture_default_str();
  cls->callback([&] { action = [&] { return cmd_classify(file1, sym_tol); }; });

  int steps = 2048;
  auto* mono = app.add_subcommand("monodromy", "Relative monodromy eigenvalues");
  mono->add_option("file", file1)->required();
  mono->add_option("--steps", steps, "Time steps per period")->capture_default_str();
  mono->callback([&] { action = [&] { return cmd_monodromy(file1, steps); }; });

  auto* integ = app.add_subcommand("integrate", "Closure residual from time integration over one period");
  integ->add_option("file", file1)->required();
  integ->add_option("--steps", steps, "Time steps per period")->capture_default_str();
  integ->callback([&] { action = [&] { return cmd_integrate(file1, steps); }; });

  auto* spec = app.add_subcommand("spectrum", "Spatial and temporal power spectra as CSV");
  spec->add_option("file", file1)->required();
  spec->callback([&] { action = [&] { return cmd_spectrum(file1); }; });

  auto* cmp = app.add_subcommand("orbit-compare", "Same, conjugate or distinct group orbits");
  cmp->add_option("file", file1)->required();
  cmp->add_option("file2", file2)->required();
  cmp->add_option("--tol", sym_tol)->capture_default_str();
  cmp->callback([&] { action = [&] { return cmd_orbit_compare(file1, file2, sym_tol); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  if (!threads) threads = threads_from_env();
  if (threads) omp_set_num_threads(*threads);

  try {
    return action();
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kParse;
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kParse;
  } catch (const SolverFailure& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
}

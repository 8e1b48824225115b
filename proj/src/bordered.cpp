#include "cgle/bordered.hpp"

#include <algorithm>
#include <exception>

#include <Eigen/Dense>

#include "cgle/error.hpp"

namespace cgle {

RealVector UnderdeterminedSystem::column(Index j) const {
  RealVector e = RealVector::Zero(unknowns());
  e[j] = 1.0;
  return apply(e);
}

CgleJacobian::CgleJacobian(StatePoint s) : state_(std::move(s)) {}

Index CgleJacobian::equations() const { return equation_count(state_.grid()); }
Index CgleJacobian::unknowns() const { return unknown_count(state_.grid()); }
RealVector CgleJacobian::apply(const RealVector& x) const { return jvp(state_, x); }
RealVector CgleJacobian::precondition(const RealVector& r) const { return precond_apply(state_, r); }

std::vector<RealVector> CgleJacobian::kernel_candidates() const {
  const auto gens = kernel_generators(state_);
  std::vector<RealVector> out(gens.begin(), gens.end());
  for (Index j = equations(); j < unknowns(); ++j) {
    RealVector e = RealVector::Zero(unknowns());
    e[j] = 1.0;
    out.push_back(std::move(e));
  }
  return out;
}

std::optional<std::array<Index, 3>> CgleJacobian::generator_columns() const {
  return select_swap_columns(state_).columns;
}

ColumnPartition make_partition(Index p, Index q, std::array<Index, 3> dropped) {
  if (q != p + 3) throw DimensionError("bordered split needs exactly three more unknowns than equations");
  std::sort(dropped.begin(), dropped.end());
  for (int k = 0; k < 3; ++k) {
    if (dropped[k] < 0 || dropped[k] >= q) throw DomainError("dropped column out of range");
    if (k > 0 && dropped[k] == dropped[k - 1]) throw DomainError("dropped columns must be distinct");
  }
  auto is_dropped = [&](Index j) { return std::find(dropped.begin(), dropped.end(), j) != dropped.end(); };

  ColumnPartition part;
  part.dropped = dropped;
  part.kept.assign(static_cast<std::size_t>(p), -1);
  std::vector<Index> extras;
  for (Index j = p; j < q; ++j) {
    if (!is_dropped(j)) extras.push_back(j);
  }
  std::size_t next = 0;
  for (Index pos = 0; pos < p; ++pos) {
    part.kept[pos] = is_dropped(pos) ? extras[next++] : pos;
  }
  return part;
}

std::vector<RealVector> estimate_kernel(const UnderdeterminedSystem& sys) {
  const Index q = sys.unknowns();

  std::vector<RealVector> X;
  for (const RealVector& c : sys.kernel_candidates()) {
    if (c.size() != q) throw DimensionError("kernel candidate has wrong length");
    const double n0 = c.norm();
    if (n0 == 0.0) continue;
    RealVector v = c;
    for (int pass = 0; pass < 2; ++pass) {
      for (const RealVector& x : X) v -= x.dot(v) * x;
    }
    const double n1 = v.norm();
    if (n1 > 1e-8 * n0) X.push_back(v / n1);
  }
  if (X.size() < 3) throw DomainError("kernel candidates span fewer than three directions");

  const Index r = static_cast<Index>(X.size());
  std::vector<RealVector> Y;
  Y.reserve(X.size());
  for (const RealVector& x : X) Y.push_back(sys.apply(x));
  Eigen::MatrixXd G(r, r);
  for (Index i = 0; i < r; ++i) {
    for (Index j = i; j < r; ++j) G(i, j) = G(j, i) = Y[i].dot(Y[j]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);

  std::vector<RealVector> basis(3, RealVector::Zero(q));
  for (int k = 0; k < 3; ++k) {
    for (Index i = 0; i < r; ++i) basis[k] += es.eigenvectors()(i, k) * X[i];
  }
  return basis;
}

namespace {

ColumnPartition kernel_estimate_partition(const UnderdeterminedSystem& sys) {
  const Index p = sys.equations();
  const Index q = sys.unknowns();
  const std::vector<RealVector> basis = estimate_kernel(sys);
  Eigen::MatrixXd K(3, q);
  for (int k = 0; k < 3; ++k) K.row(k) = basis[k].transpose();

  // Column-pivoted Gram-Schmidt on K: each pick maximizes the remaining column norm.
  std::array<Index, 3> dropped{};
  for (int step = 0; step < 3; ++step) {
    Index best = -1;
    double best_norm = -1.0;
    for (Index j = 0; j < q; ++j) {
      if (std::find(dropped.begin(), dropped.begin() + step, j) != dropped.begin() + step) continue;
      const double nj = K.col(j).norm();
      if (nj > best_norm) {
        best_norm = nj;
        best = j;
      }
    }
    dropped[step] = best;
    const Eigen::Vector3d u = K.col(best) / best_norm;
    K -= u * (u.transpose() * K);
  }
  return make_partition(p, q, dropped);
}

}  // namespace

ColumnPartition choose_partition(const UnderdeterminedSystem& sys, PartitionRule rule) {
  if (rule == PartitionRule::generator_entries) {
    if (auto cols = sys.generator_columns()) return make_partition(sys.equations(), sys.unknowns(), *cols);
  }
  return kernel_estimate_partition(sys);
}

int StepReport::max_js_iterations() const {
  return *std::max_element(js_iterations.begin(), js_iterations.end());
}

SubproblemOne solve_subproblem_one(const UnderdeterminedSystem& sys, const ColumnPartition& part,
                                   const RealVector& b, const GmresConfig& cfg, bool concurrent) {
  const Index p = sys.equations();
  const Index q = sys.unknowns();
  if (b.size() != p) throw DimensionError("right-hand side length does not match equation count");
  if (static_cast<Index>(part.kept.size()) != p) throw DimensionError("partition does not match system");

  const LinearOperator js = [&](const Eigen::VectorXd& y) {
    RealVector x = RealVector::Zero(q);
    for (Index pos = 0; pos < p; ++pos) x[part.kept[pos]] = y[pos];
    return sys.apply(x);
  };
  const LinearOperator prec = [&](const Eigen::VectorXd& r) { return sys.precondition(r); };

  std::array<RealVector, 4> rhs;
  for (int k = 0; k < 3; ++k) rhs[k] = sys.column(part.dropped[k]);
  rhs[3] = b;

  SubproblemOne out;
  std::array<std::exception_ptr, 4> errors;
  auto solve = [&](int k) {
    try {
      out.solves[k] = gmres(js, rhs[k], cfg, prec);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (concurrent) {
#pragma omp parallel for num_threads(4) schedule(static, 1)
    for (int k = 0; k < 4; ++k) solve(k);
  } else {
    for (int k = 0; k < 4; ++k) solve(k);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  out.M.resize(p, 3);
  for (int k = 0; k < 3; ++k) out.M.col(k) = out.solves[k].x;
  out.c = out.solves[3].x;
  return out;
}

GmresResult solve_subproblem_two(const Eigen::MatrixXd& M, const Eigen::VectorXd& c, const GmresConfig& cfg) {
  const LinearOperator bmat = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return y + M * (M.transpose() * y);
  };
  return gmres(bmat, c, cfg);
}

std::pair<RealVector, StepReport> min_norm_solve(const UnderdeterminedSystem& sys, const RealVector& b,
                                                 const BorderedConfig& cfg) {
  const Index p = sys.equations();
  const Index q = sys.unknowns();
  if (q != p + 3) throw DimensionError("bordered split needs exactly three more unknowns than equations");
  if (b.size() != p) throw DimensionError("right-hand side length does not match equation count");

  StepReport report;
  report.partition = cfg.partition ? make_partition(p, q, cfg.partition->dropped)
                                   : choose_partition(sys, cfg.rule);
  const ColumnPartition& part = report.partition;

  const SubproblemOne one = solve_subproblem_one(sys, part, b, cfg.gmres, cfg.concurrent);
  for (int k = 0; k < 4; ++k) {
    report.js_iterations[k] = one.solves[k].iterations;
    if (!one.solves[k].converged) {
      report.failure = "Js solve " + std::to_string(k) + " stopped after " +
                       std::to_string(one.solves[k].iterations) + " iterations at relative residual " +
                       std::to_string(one.solves[k].relative_residual);
      return {RealVector(), report};
    }
  }

  const GmresResult two = solve_subproblem_two(one.M, one.c, cfg.gmres);
  report.b_iterations = two.iterations;
  if (!two.converged) {
    report.failure = "B-matrix solve stopped after " + std::to_string(two.iterations) + " iterations";
    return {RealVector(), report};
  }

  RealVector z = RealVector::Zero(q);
  for (Index pos = 0; pos < p; ++pos) z[part.kept[pos]] = two.x[pos];
  const Eigen::Vector3d tail = one.M.transpose() * two.x;
  for (int k = 0; k < 3; ++k) z[part.dropped[k]] = tail[k];

  report.step_norm = z.norm();
  report.success = true;
  return {z, report};
}

std::pair<RealVector, StepReport> bordered_newton_step(const StatePoint& s, const RealVector& b,
                                                       const BorderedConfig& cfg) {
  return min_norm_solve(CgleJacobian(s), b, cfg);
}

}  // namespace cgle

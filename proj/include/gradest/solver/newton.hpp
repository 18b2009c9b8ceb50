#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gradest/solver/discretization.hpp"

namespace gradest {

struct SolverOptions {
  double tolerance = 1e-10;        // discrete L2 residual at the target parameters
  double stage_tolerance = 1e-8;   // intermediate continuation stages
  int max_iterations = 50;         // per continuation stage
  double backtrack = 0.5;
  double armijo = 1e-4;
  double min_step = 1.0 / 4096.0;
  double eps_ratio = 0.1;          // geometric eps schedule from max(eps, 1)
  int gamma_stages = 4;            // linear gamma schedule from min(gamma, 2)
  int max_bisections = 8;          // extra stages inserted when one fails
  bool continuation = true;
};

inline void validate(const SolverOptions& o) {
  if (!(o.tolerance > 0.0) || !(o.stage_tolerance > 0.0)) throw ParameterError("solver tolerance must be positive");
  if (o.max_iterations < 1) throw ParameterError("max_iterations must be positive");
  if (!(o.backtrack > 0.0 && o.backtrack < 1.0)) throw ParameterError("backtracking factor must lie in (0,1)");
  if (!(o.eps_ratio > 0.0 && o.eps_ratio < 1.0)) throw ParameterError("eps ratio must lie in (0,1)");
  if (o.gamma_stages < 1) throw ParameterError("gamma_stages must be positive");
}

struct StageReport {
  double eps = 0.0;
  double gamma = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

struct SolveReport {
  std::vector<StageReport> stages;
  double final_residual = 0.0;
  int damping_events = 0;
  int total_iterations = 0;
  double wall_time = 0.0;
  bool converged = false;
};

/// Raised when every continuation/damping fallback is exhausted. Carries the
/// best iterate seen and its residual.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<double> best, double best_residual, SolveReport report)
      : Error(what), best_(std::move(best)), best_residual_(best_residual), report_(std::move(report)) {}
  const std::vector<double>& best_iterate() const { return best_; }
  double best_residual() const { return best_residual_; }
  const SolveReport& report() const { return report_; }

 private:
  std::vector<double> best_;
  double best_residual_;
  SolveReport report_;
};

/// Continuation schedule: eps geometric from max(eps,1) at gamma_0 = min(gamma,2),
/// then gamma linear to the target at the target eps.
inline std::vector<StageParameters> continuation_schedule(double eps, double gamma, const SolverOptions& o) {
  std::vector<StageParameters> s;
  const double g0 = std::min(gamma, 2.0);
  if (!o.continuation) return {{eps, gamma}};
  for (double e = std::max(eps, 1.0); e > eps * (1.0 + 1e-12); e *= o.eps_ratio) s.push_back({e, g0});
  s.push_back({eps, g0});
  if (gamma > g0) {
    const int stages = std::min(o.gamma_stages, 1 + static_cast<int>(std::ceil(gamma - g0)));
    for (int j = 1; j < stages; ++j) s.push_back({eps, g0 + (gamma - g0) * j / (stages - 1)});
    if (stages == 1) s.push_back({eps, gamma});
  }
  return s;
}

namespace detail {

template <int Dim>
class LinearSolver {
 public:
  Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& rhs, bool& ok) {
    ok = true;
    if constexpr (Dim == 3) {
      {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
        it.preconditioner().setDroptol(1e-4);
        it.preconditioner().setFillfactor(4);
        it.setTolerance(1e-13);
        it.setMaxIterations(2000);
        it.compute(J);
        if (it.info() == Eigen::Success) {
          Eigen::VectorXd x = it.solve(rhs);
          if (it.info() == Eigen::Success && x.allFinite()) return x;
        }
      }
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      ok = false;
      return Eigen::VectorXd::Zero(rhs.size());
    }
    Eigen::VectorXd x = lu.solve(rhs);
    ok = lu.info() == Eigen::Success && x.allFinite();
    return x;
  }
};

struct StageOutcome {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

template <int Dim>
StageOutcome newton_stage(const DiscreteOperator<Dim>& op, ScalarField<Dim>& u, double tol,
                          const SolverOptions& o, int& damping_events) {
  LinearSolver<Dim> linear;
  StageOutcome out;
  auto r = op.residual(u);
  double norm = op.norm(r);
  for (int it = 0; it < o.max_iterations; ++it) {
    if (!std::isfinite(norm)) break;
    if (norm <= tol) {
      out.converged = true;
      out.iterations = it;
      out.residual = norm;
      return out;
    }
    const auto J = op.jacobian(u);
    Eigen::Map<const Eigen::VectorXd> rv(r.values.data(), static_cast<Eigen::Index>(r.size()));
    bool ok = false;
    const Eigen::VectorXd delta = linear.solve(J, -rv, ok);
    if (!ok) break;

    // Backtracking on the merit 1/2 |R|^2 with Armijo sufficient decrease.
    double t = 1.0;
    bool accepted = false;
    ScalarField<Dim> trial(u.grid);
    ScalarField<Dim> r_trial;
    double trial_norm = 0.0;
    while (t >= o.min_step) {
      for (std::size_t k = 0; k < u.size(); ++k) trial[k] = u[k] + t * delta[static_cast<Eigen::Index>(k)];
      r_trial = op.residual(trial);
      trial_norm = op.norm(r_trial);
      if (std::isfinite(trial_norm) && trial_norm * trial_norm <= (1.0 - 2.0 * o.armijo * t) * norm * norm) {
        accepted = true;
        break;
      }
      t *= o.backtrack;
      ++damping_events;
    }
    out.iterations = it + 1;
    if (!accepted) break;
    u = std::move(trial);
    r = std::move(r_trial);
    norm = trial_norm;
  }
  out.residual = norm;
  out.converged = std::isfinite(norm) && norm <= tol;
  return out;
}

}  // namespace detail

template <int Dim>
struct SolveResult {
  ScalarField<Dim> u;
  SolveReport report;
};

/// Damped Newton with (eps, gamma) continuation. Requires lambda > 0.
template <int Dim>
SolveResult<Dim> solve(const ProblemSpec& pb, const Grid<Dim>& grid, const SolverOptions& options = {},
                       const std::optional<ScalarField<Dim>>& initial = std::nullopt) {
  validate(pb);
  validate(options);
  if (!(pb.lambda > 0.0))
    throw UnsupportedRegime("lambda = 0 is not solved directly; run a lambda sweep towards 0 instead");
  if (!(pb.eps > 0.0)) throw ParameterError("eps must be positive");
  const auto start = std::chrono::steady_clock::now();

  DiscreteOperator<Dim> op(pb, grid);
  SolveReport report;

  ScalarField<Dim> u(grid);
  if (initial) {
    if (!(initial->grid == grid)) throw ContractError("initial guess does not conform to the grid");
    u = *initial;
  } else {
    const double mean_f = integral(op.source()) / grid.box().volume();
    const double u0 = (mean_f - op.hamiltonian_at_origin()) / pb.lambda;
    u.values.assign(grid.size(), u0);
  }

  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  // Accept the starting point outright when it already solves the target problem.
  if (double r0 = op.norm(op.residual(u)); r0 <= options.tolerance) {
    report.stages.push_back({pb.eps, pb.gamma, 0, r0, true});
    report.final_residual = r0;
    report.converged = true;
    report.wall_time = elapsed();
    return {std::move(u), report};
  }

  std::vector<StageParameters> pending =
      initial ? std::vector<StageParameters>{{pb.eps, pb.gamma}} : continuation_schedule(pb.eps, pb.gamma, options);
  StageParameters last_ok = pending.front();
  bool have_last_ok = false;
  int bisections = 0;
  ScalarField<Dim> u_ok = u;
  ScalarField<Dim> best = u;
  double best_res = std::numeric_limits<double>::infinity();

  std::size_t idx = 0;
  while (idx < pending.size()) {
    const StageParameters stage = pending[idx];
    const bool final_stage = idx + 1 == pending.size();
    op.set_stage(stage);
    ScalarField<Dim> trial = u_ok;
    const auto out = detail::newton_stage(op, trial, final_stage ? options.tolerance : options.stage_tolerance,
                                          options, report.damping_events);
    report.total_iterations += out.iterations;
    report.stages.push_back({stage.eps, stage.gamma, out.iterations, out.residual, out.converged});
    if (final_stage && std::isfinite(out.residual) && out.residual < best_res) {
      best_res = out.residual;
      best = trial;
    }
    if (out.converged) {
      u_ok = std::move(trial);
      last_ok = stage;
      have_last_ok = true;
      ++idx;
      continue;
    }
    // Insert an intermediate stage between the last converged parameters and this one.
    const StageParameters from = have_last_ok ? last_ok : StageParameters{std::max(stage.eps, 1.0) * 10.0, stage.gamma};
    if (bisections >= options.max_bisections || (!have_last_ok && idx > 0)) {
      report.final_residual = best_res;
      report.wall_time = elapsed();
      throw NonConvergence("Newton continuation failed at eps = " + std::to_string(stage.eps) +
                               ", gamma = " + std::to_string(stage.gamma),
                           best.values, best_res, report);
    }
    ++bisections;
    const StageParameters mid{std::sqrt(from.eps * stage.eps), 0.5 * (from.gamma + stage.gamma)};
    pending.insert(pending.begin() + static_cast<std::ptrdiff_t>(idx), mid);
  }

  op.set_stage({pb.eps, pb.gamma});
  report.final_residual = op.norm(op.residual(u_ok));
  report.converged = report.final_residual <= options.tolerance;
  report.wall_time = elapsed();
  if (!report.converged)
    throw NonConvergence("final residual above tolerance", u_ok.values, report.final_residual, report);
  return {std::move(u_ok), report};
}

}  // namespace gradest

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradest/solver/newton.hpp"

namespace gradest {

struct EpsilonSweepRow {
  double eps = 0.0;
  double norm_q_gamma = 0.0;  // ||Du||_{L^{q gamma}}
  double norm_eta = 0.0;      // ||Du||_{L^eta}
  SolveReport report;
};

struct EpsilonSweepTable {
  double q_gamma = 0.0;
  double eta = 0.0;
  std::vector<EpsilonSweepRow> rows;
  bool partial = false;
  std::string failure;

  /// (max - min) / max of the L^{q gamma} column.
  double relative_variation() const {
    if (rows.empty()) return 0.0;
    double lo = rows.front().norm_q_gamma, hi = lo;
    for (const auto& r : rows) {
      lo = std::min(lo, r.norm_q_gamma);
      hi = std::max(hi, r.norm_q_gamma);
    }
    return hi > 0.0 ? (hi - lo) / hi : 0.0;
  }
};

/// Solves for each eps in a strictly decreasing list, warm-starting from the previous
/// solution (a cold solve is tried when the warm start fails).
template <int Dim>
EpsilonSweepTable epsilon_sweep(ProblemSpec pb, const Grid<Dim>& grid, const std::vector<double>& eps_list,
                                double q_gamma, double eta, const SolverOptions& options = {}) {
  if (eps_list.empty()) throw ParameterError("eps list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw ParameterError("eps values must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw ParameterError("eps list must be strictly decreasing");
  }
  EpsilonSweepTable table;
  table.q_gamma = q_gamma;
  table.eta = eta;
  std::optional<ScalarField<Dim>> previous;
  for (double eps : eps_list) {
    pb.eps = eps;
    std::optional<SolveResult<Dim>> res;
    try {
      res = solve<Dim>(pb, grid, options, previous);
    } catch (const NonConvergence& e) {
      if (!previous) {
        table.partial = true;
        table.failure = e.what();
        return table;
      }
    }
    if (!res) {
      try {
        res = solve<Dim>(pb, grid, options);
      } catch (const NonConvergence& e) {
        table.partial = true;
        table.failure = e.what();
        return table;
      }
    }
    const auto du = gradient(res->u).magnitude();
    table.rows.push_back({eps, lp_norm(du, q_gamma), lp_norm(du, eta), res->report});
    previous = std::move(res->u);
  }
  return table;
}

}  // namespace gradest

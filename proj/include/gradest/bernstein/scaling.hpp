#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gradest/model/exponents.hpp"
#include "gradest/solver/newton.hpp"

namespace gradest {

struct ScalePoint {
  double s = 0.0;
  double X = 0.0;  // ||f_s||_{L^{q_eta}}
  double Y = 0.0;  // ||Du_s||_{L^eta}
  bool solved = false;
};

struct EstimateFit {
  double eta = 0.0;
  double q_eta = 0.0;
  std::vector<ScalePoint> points;
  double slope = 0.0;        // least squares of log Y on log X over the top half
  double intercept = 0.0;
  int fitted_points = 0;
  double theoretical = 0.0;  // 1/(p-1)
  bool partial = false;
  std::string failure;
};

/// Exponents of the first proof chain used by the scaling fit. Two-dimensional
/// problems use the three-dimensional Sobolev bookkeeping.
inline Theorem1Exponents scaling_exponents(int N, const Rational& p, const Rational& beta) {
  return theorem1_exponents(std::max(N, 3), p, beta);
}

/// Least-squares slope and intercept of y on x; needs at least two distinct x.
inline std::pair<double, double> least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw ParameterError("degenerate least-squares abscissae");
  const double slope = (n * sxy - sx * sy) / den;
  return {slope, (sy - slope * sx) / n};
}

/// Fits log Y against log X over the upper half of the scale list (at least three points).
inline void fit_top_half(EstimateFit& fit) {
  std::vector<double> lx, ly;
  const std::size_t start = fit.points.size() - std::max<std::size_t>(3, (fit.points.size() + 1) / 2);
  for (std::size_t i = start; i < fit.points.size(); ++i) {
    if (!fit.points[i].solved || !(fit.points[i].X > 0.0) || !(fit.points[i].Y > 0.0)) continue;
    lx.push_back(std::log(fit.points[i].X));
    ly.push_back(std::log(fit.points[i].Y));
  }
  fit.fitted_points = static_cast<int>(lx.size());
  if (lx.size() < 3) {
    fit.partial = true;
    return;
  }
  std::tie(fit.slope, fit.intercept) = least_squares_line(lx, ly);
}

/// Solves the problem with source s * f for every s and fits the growth of ||Du||_{L^eta}
/// in ||f_s||_{L^{q_eta}}.
template <int Dim>
EstimateFit scaling_fit(const ProblemSpec& base, const Grid<Dim>& grid, const std::vector<double>& s_list, double eta,
                        double q_eta, const SolverOptions& options = {}) {
  if (s_list.size() < 5) throw ParameterError("scaling fit needs at least five scales");
  for (std::size_t i = 1; i < s_list.size(); ++i)
    if (!(s_list[i] > s_list[i - 1])) throw ParameterError("scales must be increasing");
  EstimateFit fit;
  fit.eta = eta;
  fit.q_eta = q_eta;
  fit.theoretical = 1.0 / (base.p - 1.0);
  for (double s : s_list) {
    ProblemSpec pb = base;
    pb.source = scaled(base.source, s);
    ScalePoint pt;
    pt.s = s;
    pt.X = lp_norm(evaluate_source(pb.source, grid), q_eta);
    try {
      const auto res = solve<Dim>(pb, grid, options);
      pt.Y = lp_norm(gradient(res.u).magnitude(), eta);
      pt.solved = true;
    } catch (const NonConvergence& e) {
      fit.partial = true;
      fit.failure = e.what();
    }
    fit.points.push_back(pt);
  }
  fit_top_half(fit);
  return fit;
}

}  // namespace gradest

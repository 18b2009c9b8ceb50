#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "gradest/grid/operators.hpp"

namespace gradest {

struct LevelRow {
  double k = 0.0;
  double measure = 0.0;         // |Omega_k|
  double Z = 0.0;               // int ((v - k)^+)^{r gamma}
  double chebyshev_lhs = 0.0;   // |Omega_k| k
  double chebyshev_rhs = 0.0;   // int sqrt(|Du|^2 + 1)
  bool chebyshev_pass = false;
  double omega_raw = 0.0;       // max(0, Z^theta - c Z)
  double omega = 0.0;           // nonincreasing majorant of omega_raw
  std::optional<double> z_minus;
  std::optional<double> z_plus;
};

struct LevelScan {
  double r = 0.0;
  double gamma = 0.0;
  double theta = 0.0;  // (N-2)/N; 1/3 in two dimensions
  double c = 0.0;
  double v_max = 0.0;
  std::vector<LevelRow> rows;

  bool Z_nonincreasing() const {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].Z > rows[i - 1].Z) return false;
    return true;
  }
  bool measure_nonincreasing() const {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].measure > rows[i - 1].measure) return false;
    return true;
  }
  bool chebyshev_all() const {
    return std::all_of(rows.begin(), rows.end(), [](const LevelRow& r) { return r.chebyshev_pass; });
  }
  /// The raw omega_k (before the majorant) is nonincreasing over the upper half of the k range.
  bool omega_raw_nonincreasing_top_half() const {
    const std::size_t start = rows.size() / 2;
    for (std::size_t i = start + 1; i < rows.size(); ++i)
      if (rows[i].omega_raw > rows[i - 1].omega_raw * (1.0 + 1e-12)) return false;
    return true;
  }
};

/// Roots z- < z+ of z^theta = omega + c z, when they exist.
inline std::pair<std::optional<double>, std::optional<double>> dichotomy_roots(double theta, double c, double omega) {
  auto g = [&](double z) { return std::pow(z, theta) - c * z - omega; };
  auto bisect = [&](double lo, double hi) {
    const bool rising = g(lo) < g(hi);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((g(mid) < 0.0) == rising) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  if (!(c > 0.0)) {
    if (omega <= 0.0) return {0.0, std::nullopt};
    return {std::pow(omega, 1.0 / theta), std::nullopt};
  }
  const double z_star = std::pow(theta / c, 1.0 / (1.0 - theta));
  if (g(z_star) <= 0.0) return {std::nullopt, std::nullopt};
  std::optional<double> zm = omega <= 0.0 ? 0.0 : bisect(0.0, z_star);
  double hi = 2.0 * z_star;
  while (g(hi) > 0.0) hi *= 2.0;
  return {zm, bisect(z_star, hi)};
}

/// Superlevel scan of v = sqrt(|Du|^2 + eps). c is the least-squares slope of
/// Z^theta against Z (with intercept, clamped at 0); omega_k is the smallest
/// admissible value and its nonincreasing majorant.
template <int Dim>
LevelScan levelset_scan(const ScalarField<Dim>& u, double eps, double r, double gamma, const std::vector<double>& k_list) {
  for (std::size_t i = 1; i < k_list.size(); ++i)
    if (!(k_list[i] > k_list[i - 1])) throw ParameterError("k list must be increasing");
  const auto& g = u.grid;
  const auto du = gradient(u);
  const double vol = g.cell_volume();
  std::vector<double> v(g.size());
  double cheb_rhs = 0.0;
  LevelScan scan;
  scan.r = r;
  scan.gamma = gamma;
  scan.theta = Dim > 2 ? static_cast<double>(Dim - 2) / Dim : 1.0 / 3.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double s = du.norm_sq(c);
    v[c] = std::sqrt(s + eps);
    cheb_rhs += std::sqrt(s + 1.0);
    scan.v_max = std::max(scan.v_max, v[c]);
  }
  cheb_rhs *= vol;

  for (double k : k_list) {
    LevelRow row;
    row.k = k;
    std::size_t count = 0;
    double z = 0.0;
    for (double vc : v)
      if (vc > k) {
        ++count;
        z += std::pow(vc - k, r * gamma);
      }
    row.measure = static_cast<double>(count) * vol;
    row.Z = z * vol;
    row.chebyshev_lhs = row.measure * k;
    row.chebyshev_rhs = cheb_rhs;
    row.chebyshev_pass = row.chebyshev_lhs <= row.chebyshev_rhs;
    scan.rows.push_back(row);
  }

  // Least-squares line through (Z, Z^theta).
  const double n = static_cast<double>(scan.rows.size());
  if (n >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& row : scan.rows) {
      const double y = std::pow(row.Z, scan.theta);
      sx += row.Z;
      sy += y;
      sxx += row.Z * row.Z;
      sxy += row.Z * y;
    }
    const double den = n * sxx - sx * sx;
    scan.c = den > 0.0 ? std::max(0.0, (n * sxy - sx * sy) / den) : 0.0;
  }
  double running = 0.0;
  for (auto it = scan.rows.rbegin(); it != scan.rows.rend(); ++it) {
    it->omega_raw = std::max(0.0, std::pow(it->Z, scan.theta) - scan.c * it->Z);
    running = std::max(running, it->omega_raw);
    it->omega = running;
  }
  for (auto& row : scan.rows) {
    auto [zm, zp] = dichotomy_roots(scan.theta, scan.c, row.omega);
    row.z_minus = zm;
    row.z_plus = zp;
  }
  return scan;
}

}  // namespace gradest

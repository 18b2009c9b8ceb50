#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "gradest/core/error.hpp"
#include "gradest/model/coefficient.hpp"

namespace gradest {

/// H(xi) = (eps + |xi|^2)^{gamma/2}. With this normalisation the lower bound
/// (c_H/2)(eps + |xi|^2)^{gamma/2} <= H holds with c_H = 2 and no additive constant.
struct PowerHamiltonian {
  double gamma = 2.0;
  double eps = 0.0;
};

using HamiltonianFamily = PowerHamiltonian;

/// c_H of the regularised lower bound; exact for the power family.
inline constexpr double kLowerBoundCH = 2.0;

inline double hamiltonian_value_sq(const HamiltonianFamily& h, double xi_sq) {
  return std::pow(h.eps + xi_sq, 0.5 * h.gamma);
}

struct HamiltonianValue {
  double H;
  std::vector<double> grad;
};

inline HamiltonianValue eval_hamiltonian(const HamiltonianFamily& h, std::span<const double> xi) {
  double s = h.eps;
  for (double x : xi) s += x * x;
  HamiltonianValue out{0.0, std::vector<double>(xi.size(), 0.0)};
  if (s == 0.0) {
    // eps = 0 at the origin: H = 0 and, for gamma > 1, H_xi = 0.
    return out;
  }
  out.H = std::pow(s, 0.5 * h.gamma);
  const double factor = h.gamma * std::pow(s, 0.5 * h.gamma - 1.0);
  for (std::size_t i = 0; i < xi.size(); ++i) out.grad[i] = factor * xi[i];
  return out;
}

/// Constant C with |H_xixi(xi)|_F <= C (eps + |xi|^2)^{(gamma-2)/2} in dimension N.
/// The Hessian has eigenvalues gamma s^{g/2-1} (N-1 times) and
/// gamma s^{g/2-1}(1 + (gamma-2)|xi|^2/s).
inline double hessian_frobenius_constant(const HamiltonianFamily& h, int N) {
  const double radial = std::max(1.0, std::abs(h.gamma - 1.0));
  return h.gamma * std::sqrt(static_cast<double>(N - 1) + radial * radial);
}

struct GrowthReport {
  double c_H = 0.0;  // inf H(xi) / |xi|^gamma
  double C_H = 0.0;  // sup |H_xi(xi)| / |xi|^{gamma-1}
  bool pass = false;
};

/// Samples the radial profile on log-spaced |xi| in [r_min, r_max], r_min >= k1 = 1.
inline GrowthReport check_growth_conditions(const HamiltonianFamily& h, double r_min, double r_max,
                                            int samples = 1000) {
  if (!(r_min >= 1.0 && r_max > r_min))
    throw ParameterError("growth conditions are sampled on 1 <= |xi| range");
  if (samples < 2) throw ParameterError("growth check needs at least 2 samples");
  GrowthReport rep;
  rep.c_H = std::numeric_limits<double>::infinity();
  for (double r : log_samples(r_min, r_max, samples)) {
    const double s = h.eps + r * r;
    const double H = std::pow(s, 0.5 * h.gamma);
    const double dH = h.gamma * std::pow(s, 0.5 * h.gamma - 1.0) * r;
    rep.c_H = std::min(rep.c_H, H / std::pow(r, h.gamma));
    rep.C_H = std::max(rep.C_H, dH / std::pow(r, h.gamma - 1.0));
  }
  rep.pass = rep.c_H > 0.0 && std::isfinite(rep.C_H);
  return rep;
}

}  // namespace gradest

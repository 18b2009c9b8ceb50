#pragma once

#include <cmath>

#include "gradest/grid/operators.hpp"

namespace gradest {

struct MaximalNorm {
  double direct = 0.0;     // (int |Du|^{gamma q})^{1/q}
  double via_power = 0.0;  // ||Du||_{L^{q gamma}}^gamma
  double relative_difference() const {
    const double s = std::max(std::abs(direct), std::abs(via_power));
    return s > 0.0 ? std::abs(direct - via_power) / s : 0.0;
  }
};

/// || |Du|^gamma ||_{L^q}, evaluated both as the L^q norm of |Du|^gamma and as the
/// gamma-th power of ||Du||_{L^{q gamma}}.
template <int Dim>
MaximalNorm maximal_regularity_norms(const ScalarField<Dim>& u, double q, double gamma) {
  if (!(q >= 1.0)) throw ParameterError("maximal regularity norm needs q >= 1");
  const auto mag = gradient(u).magnitude();
  ScalarField<Dim> powered(u.grid);
  for (std::size_t k = 0; k < mag.size(); ++k) powered[k] = std::pow(mag[k], gamma);
  MaximalNorm m;
  m.direct = lp_norm(powered, q);
  m.via_power = std::pow(lp_norm(mag, q * gamma), gamma);
  return m;
}

template <int Dim>
double maximal_regularity_norm(const ScalarField<Dim>& u, double q, double gamma) {
  return maximal_regularity_norms(u, q, gamma).direct;
}

}  // namespace gradest

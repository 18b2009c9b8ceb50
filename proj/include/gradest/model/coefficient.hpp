#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "gradest/core/error.hpp"

namespace gradest {

/// a(t) = t^{(p-2)/2}, the p-Laplacian written in terms of t = |Du|^2 + eps.
struct PowerDiffusion {
  double p = 2.0;
};

/// a(t) = t^{(p-2)/2} (1 + delta sin(log t)), delta in [0, 1/4).
struct PerturbedPower {
  double p = 2.0;
  double delta = 0.0;
};

using CoefficientFamily = std::variant<PowerDiffusion, PerturbedPower>;

inline double family_exponent(const CoefficientFamily& family) {
  return std::visit([](const auto& f) { return f.p; }, family);
}

inline void validate(const CoefficientFamily& family) {
  std::visit(
      [](const auto& f) {
        if (!(f.p > 1.0)) throw ParameterError("diffusion exponent p must exceed 1");
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, PerturbedPower>) {
          if (!(f.delta >= 0.0 && f.delta < 0.25))
            throw ParameterError("PerturbedPower oscillation delta must lie in [0, 1/4)");
        }
      },
      family);
}

struct DiffusionValue {
  double a;
  double a_prime;
};

inline DiffusionValue eval_diffusion(const CoefficientFamily& family, double t) {
  if (!(t > 0.0)) throw DomainError("diffusion coefficient evaluated at t <= 0");
  return std::visit(
      [t](const auto& f) -> DiffusionValue {
        const double e = 0.5 * (f.p - 2.0);
        const double base = std::pow(t, e);
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, PowerDiffusion>) {
          return {base, e * base / t};
        } else {
          const double lt = std::log(t);
          const double mod = 1.0 + f.delta * std::sin(lt);
          return {base * mod, e * base / t * mod + base * f.delta * std::cos(lt) / t};
        }
      },
      family);
}

/// Sampled structure constants of a coefficient family.
///
/// ratio(t) = 2 t a'(t) / a(t). The estimates are
///   c_bar   = inf a(t) / t^{(p-2)/2},   C_bar = sup a(t) / t^{(p-2)/2},
///   c_tilde = inf (2 t a' + a) / a = 1 + inf ratio,
///   C_a     = sup |ratio|  (bounds both sup ratio and 2 t |a'/a|).
struct AssumptionReport {
  double t_min = 0.0;
  double t_max = 0.0;
  int samples = 0;
  double sampled_inf_ratio = 0.0;
  double sampled_sup_ratio = 0.0;
  double c_bar = 0.0;
  double C_bar = 0.0;
  double c_tilde = 0.0;
  double C_a = 0.0;
  bool a1 = false;  // -1 < inf ratio <= sup ratio < inf
  bool a2 = false;  // 0 < c_bar <= C_bar < inf
  bool a3 = false;  // c_tilde > 0
  bool a4 = false;  // C_a finite
  bool pass() const { return a1 && a2 && a3 && a4; }
};

/// Log-spaced points t_min * (t_max/t_min)^{j/(samples-1)}, j = 0..samples-1.
inline std::vector<double> log_samples(double t_min, double t_max, int samples) {
  std::vector<double> ts(static_cast<std::size_t>(samples));
  const double l0 = std::log(t_min);
  const double step = (std::log(t_max) - l0) / (samples - 1);
  for (int j = 0; j < samples; ++j) ts[static_cast<std::size_t>(j)] = std::exp(l0 + step * j);
  ts.back() = t_max;
  ts.front() = t_min;
  return ts;
}

inline AssumptionReport check_structure_conditions(const CoefficientFamily& family, double t_min,
                                                   double t_max, int samples = 1000) {
  if (!(t_min > 0.0 && t_min < t_max)) throw ParameterError("need 0 < t_min < t_max");
  if (samples < 100) throw ParameterError("structure check needs at least 100 samples");
  const double e = 0.5 * (family_exponent(family) - 2.0);

  AssumptionReport rep;
  rep.t_min = t_min;
  rep.t_max = t_max;
  rep.samples = samples;
  double inf_ratio = std::numeric_limits<double>::infinity();
  double sup_ratio = -inf_ratio;
  double sup_abs = 0.0;
  double c_bar = std::numeric_limits<double>::infinity();
  double C_bar = 0.0;
  for (double t : log_samples(t_min, t_max, samples)) {
    const auto [a, ap] = eval_diffusion(family, t);
    if (!(a > 0.0))
      throw StructureViolation("coefficient a(t) <= 0 at t = " + std::to_string(t), t);
    const double ratio = 2.0 * t * ap / a;
    inf_ratio = std::min(inf_ratio, ratio);
    sup_ratio = std::max(sup_ratio, ratio);
    sup_abs = std::max(sup_abs, std::abs(ratio));
    const double scaled = a / std::pow(t, e);
    c_bar = std::min(c_bar, scaled);
    C_bar = std::max(C_bar, scaled);
  }
  rep.sampled_inf_ratio = inf_ratio;
  rep.sampled_sup_ratio = sup_ratio;
  rep.c_bar = c_bar;
  rep.C_bar = C_bar;
  rep.c_tilde = 1.0 + inf_ratio;
  rep.C_a = sup_abs;
  rep.a1 = inf_ratio > -1.0 && std::isfinite(sup_ratio);
  rep.a2 = c_bar > 0.0 && std::isfinite(C_bar);
  rep.a3 = rep.c_tilde > 0.0;
  rep.a4 = std::isfinite(rep.C_a);
  return rep;
}

}  // namespace gradest

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "gradest/core/error.hpp"
#include "gradest/grid/field.hpp"

namespace gradest {

struct SourceSpec;

/// A * prod_i cos(m_i pi x_i / L_i); every factor has zero normal derivative on the box faces.
struct CosineProduct {
  double amplitude = 1.0;
  std::vector<int> wave{};
};

/// A * (|x - x0|^2 + rho^2)^{-a/2}. With rho = 0 this is in L^q iff a q < N.
struct RadialSingular {
  std::vector<double> center{};
  double power = 0.0;
  double amplitude = 1.0;
  double core = 0.0;
  /// Supremum of admissible Lebesgue exponents, N / a (exclusive). Set by make_radial_singular.
  double q_sup = std::numeric_limits<double>::infinity();
};

struct Scaled {
  std::shared_ptr<const SourceSpec> base;
  double factor = 1.0;
};

/// sum over m in {0..M}^N of c_m prod_i cos(m_i pi x_i / L_i), c_m uniform in
/// [-1, 1] scaled by 1/(1 + |m|^2), drawn from a 64-bit Mersenne twister.
struct SeededSmoothRandom {
  std::uint64_t seed = 0;
  int cutoff = 4;
};

/// Cell values on a specific grid (cells per axis, row-major).
struct Tabulated {
  std::vector<int> cells{};
  std::vector<double> values{};
};

struct SourceSpec {
  std::variant<CosineProduct, RadialSingular, Scaled, SeededSmoothRandom, Tabulated> kind;
};

inline SourceSpec scaled(const SourceSpec& base, double s) {
  if (!(s > 0.0)) throw ParameterError("source scale must be positive");
  return SourceSpec{Scaled{std::make_shared<const SourceSpec>(base), s}};
}

/// Builds a RadialSingular source in dimension N. When `target_q` is given the
/// source must belong to L^{target_q}: a * q < N.
inline RadialSingular make_radial_singular(int N, std::vector<double> center, double power, double amplitude,
                                           double core, std::optional<double> target_q = std::nullopt) {
  if (static_cast<int>(center.size()) != N) throw ParameterError("singularity centre has wrong dimension");
  if (!(power > 0.0)) throw ParameterError("singularity power must be positive");
  if (!(core >= 0.0)) throw ParameterError("core radius must be non-negative");
  RadialSingular r{std::move(center), power, amplitude, core, static_cast<double>(N) / power};
  if (target_q && !(power * *target_q < N))
    throw MembershipError("RadialSingular with a = " + std::to_string(power) + " is not in L^" +
                          std::to_string(*target_q) + " for N = " + std::to_string(N) + " (a q >= N)");
  return r;
}

/// Supremum of q with f in L^q (infinity for bounded families). Scaling preserves membership.
inline double lq_membership_sup(const SourceSpec& s) {
  return std::visit(
      [](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, RadialSingular>) {
          return k.q_sup;
        } else if constexpr (std::is_same_v<K, Scaled>) {
          return lq_membership_sup(*k.base);
        } else {
          return std::numeric_limits<double>::infinity();
        }
      },
      s.kind);
}

inline bool belongs_to_lq(const SourceSpec& s, double q) { return q < lq_membership_sup(s); }

namespace detail {

inline double canonical_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <int Dim>
std::vector<double> random_coefficients(const SeededSmoothRandom& spec) {
  std::mt19937_64 rng(spec.seed);
  std::size_t count = 1;
  for (int d = 0; d < Dim; ++d) count *= static_cast<std::size_t>(spec.cutoff + 1);
  std::vector<double> c(count);
  for (std::size_t j = 0; j < count; ++j) {
    std::size_t rem = j;
    double m2 = 0.0;
    for (int d = Dim - 1; d >= 0; --d) {
      const double m = static_cast<double>(rem % static_cast<std::size_t>(spec.cutoff + 1));
      rem /= static_cast<std::size_t>(spec.cutoff + 1);
      m2 += m * m;
    }
    c[j] = (2.0 * canonical_uniform(rng) - 1.0) / (1.0 + m2);
  }
  return c;
}

}  // namespace detail

template <int Dim>
ScalarField<Dim> evaluate_source(const SourceSpec& spec, const Grid<Dim>& grid) {
  using std::numbers::pi;
  return std::visit(
      [&](const auto& k) -> ScalarField<Dim> {
        using K = std::decay_t<decltype(k)>;
        const auto& L = grid.box().extents;
        if constexpr (std::is_same_v<K, CosineProduct>) {
          if (static_cast<int>(k.wave.size()) != Dim) throw ContractError("cosine wave vector has wrong dimension");
          return sample<Dim>(grid, [&](const std::array<double, Dim>& x) {
            double v = k.amplitude;
            for (int d = 0; d < Dim; ++d) v *= std::cos(k.wave[d] * pi * x[d] / L[d]);
            return v;
          });
        } else if constexpr (std::is_same_v<K, RadialSingular>) {
          if (static_cast<int>(k.center.size()) != Dim) throw ContractError("singularity centre has wrong dimension");
          return sample<Dim>(grid, [&](const std::array<double, Dim>& x) {
            double r2 = k.core * k.core;
            for (int d = 0; d < Dim; ++d) r2 += (x[d] - k.center[d]) * (x[d] - k.center[d]);
            return k.amplitude * std::pow(r2, -0.5 * k.power);
          });
        } else if constexpr (std::is_same_v<K, Scaled>) {
          auto f = evaluate_source(*k.base, grid);
          for (double& v : f.values) v *= k.factor;
          return f;
        } else if constexpr (std::is_same_v<K, SeededSmoothRandom>) {
          if (k.cutoff < 0) throw ParameterError("random source cutoff must be non-negative");
          const auto coeff = detail::random_coefficients<Dim>(k);
          const int M = k.cutoff + 1;
          ScalarField<Dim> f(grid);
          std::array<std::vector<double>, Dim> cosines;
          for (std::size_t c = 0; c < grid.size(); ++c) {
            const auto x = grid.center(c);
            for (int d = 0; d < Dim; ++d) {
              cosines[d].resize(static_cast<std::size_t>(M));
              for (int m = 0; m < M; ++m) cosines[d][static_cast<std::size_t>(m)] = std::cos(m * pi * x[d] / L[d]);
            }
            double v = 0.0;
            for (std::size_t j = 0; j < coeff.size(); ++j) {
              std::size_t rem = j;
              double term = coeff[j];
              for (int d = Dim - 1; d >= 0; --d) {
                term *= cosines[d][rem % static_cast<std::size_t>(M)];
                rem /= static_cast<std::size_t>(M);
              }
              v += term;
            }
            f[c] = v;
          }
          return f;
        } else {
          if (static_cast<int>(k.cells.size()) != Dim) throw ContractError("tabulated source has wrong dimension");
          for (int d = 0; d < Dim; ++d)
            if (k.cells[d] != grid.cells(d)) throw ContractError("tabulated source does not match the grid");
          return ScalarField<Dim>(grid, k.values);
        }
      },
      spec.kind);
}

template <int Dim>
SourceSpec tabulate(const ScalarField<Dim>& f) {
  Tabulated t;
  for (int d = 0; d < Dim; ++d) t.cells.push_back(f.grid.cells(d));
  t.values = f.values;
  return SourceSpec{std::move(t)};
}

}  // namespace gradest

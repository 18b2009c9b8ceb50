#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "gradest/solver/discretization.hpp"

namespace gradest {

/// Discrete manufactured source: f* = lambda u* - div_flux(a(w*) Du*) + H(Du*),
/// so residual(problem with f*, u*) vanishes identically.
template <int Dim>
SourceSpec manufacture_source(const ProblemSpec& pb, const ScalarField<Dim>& u_star) {
  ProblemSpec zero = pb;
  zero.source = SourceSpec{CosineProduct{0.0, std::vector<int>(static_cast<std::size_t>(Dim), 0)}};
  return tabulate(DiscreteOperator<Dim>(zero, u_star.grid).residual(u_star));
}

/// Smooth function with closed-form first and second derivatives.
template <int Dim>
struct AnalyticField {
  using Point = std::array<double, Dim>;
  std::function<double(const Point&)> value;
  std::function<std::array<double, Dim>(const Point&)> grad;
  std::function<std::array<std::array<double, Dim>, Dim>(const Point&)> hess;
};

/// prod_i cos(m_i pi x_i / L_i) on a box; satisfies the Neumann condition.
template <int Dim>
AnalyticField<Dim> cosine_product_field(const Box<Dim>& box, std::array<int, Dim> wave, double amplitude = 1.0) {
  using std::numbers::pi;
  AnalyticField<Dim> f;
  auto k = [box, wave](int d) { return wave[d] * pi / box.extents[d]; };
  f.value = [=](const auto& x) {
    double v = amplitude;
    for (int d = 0; d < Dim; ++d) v *= std::cos(k(d) * x[d]);
    return v;
  };
  f.grad = [=](const auto& x) {
    std::array<double, Dim> g{};
    for (int i = 0; i < Dim; ++i) {
      double v = amplitude;
      for (int d = 0; d < Dim; ++d) v *= d == i ? -k(d) * std::sin(k(d) * x[d]) : std::cos(k(d) * x[d]);
      g[i] = v;
    }
    return g;
  };
  f.hess = [=](const auto& x) {
    std::array<std::array<double, Dim>, Dim> H{};
    for (int i = 0; i < Dim; ++i)
      for (int j = 0; j < Dim; ++j) {
        double v = amplitude;
        for (int d = 0; d < Dim; ++d) {
          const double c = std::cos(k(d) * x[d]);
          const double s = std::sin(k(d) * x[d]);
          if (d == i && d == j)
            v *= -k(d) * k(d) * c;
          else if (d == i || d == j)
            v *= -k(d) * s;
          else
            v *= c;
        }
        H[i][j] = v;
      }
    return H;
  };
  return f;
}

/// Continuum source lambda u* - [a(w) Lap u* + 2 a'(w) D^2u* Du*.Du*] + H(Du*), sampled at cell centres.
template <int Dim>
SourceSpec continuum_source(const ProblemSpec& pb, const AnalyticField<Dim>& u_star, const Grid<Dim>& grid) {
  ScalarField<Dim> f(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto x = grid.center(c);
    const auto g = u_star.grad(x);
    const auto H = u_star.hess(x);
    double w = pb.eps, lap = 0.0, inf = 0.0;
    for (int i = 0; i < Dim; ++i) {
      w += g[i] * g[i];
      lap += H[i][i];
      for (int j = 0; j < Dim; ++j) inf += H[i][j] * g[i] * g[j];
    }
    const auto [a, ap] = eval_diffusion(pb.coefficient, w);
    f[c] = pb.lambda * u_star.value(x) - (a * lap + 2.0 * ap * inf) + std::pow(w, 0.5 * pb.gamma);
  }
  return tabulate(f);
}

}  // namespace gradest

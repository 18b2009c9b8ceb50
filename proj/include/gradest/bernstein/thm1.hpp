#pragma once

#include <algorithm>
#include <cmath>

#include "gradest/bernstein/fields.hpp"
#include "gradest/bernstein/ledger.hpp"

namespace gradest {

/// Constants of the first proof chain, derived from the structure constants of a(.)
/// and the power Hamiltonian:
///   zeta1 = 2 min(1, c_tilde),  zeta2 = c_bar min(1, c_tilde),  nu = 1/(sqrt N + C_a),
///   c1 = zeta1 nu^2 / (2 C_bar)   (multiplies c_H^2 w^gamma/8 - 2 f^2, c_H = 2),
///   delta1 = zeta1/4,  c2 = (4 beta + 2 sqrt N)^2 / 4,  c3 = c4 = C_H (Hessian bound).
struct Thm1Constants {
  double zeta1, zeta2, nu, c1, delta1, c2, c3, c4, c_bar, C_bar, c_tilde, C_a, C_H;
};

inline Thm1Constants thm1_constants(const ProblemSpec& pb, double beta) {
  const auto rep = check_structure_conditions(pb.coefficient, pb.eps, std::max(1e6, 10.0 * pb.eps), 1000);
  Thm1Constants c{};
  c.c_bar = rep.c_bar;
  c.C_bar = rep.C_bar;
  c.c_tilde = rep.c_tilde;
  c.C_a = rep.C_a;
  c.zeta1 = 2.0 * std::min(1.0, rep.c_tilde);
  c.zeta2 = rep.c_bar * std::min(1.0, rep.c_tilde);
  c.nu = 1.0 / (std::sqrt(static_cast<double>(pb.N)) + rep.C_a);
  c.c1 = c.zeta1 * c.nu * c.nu / (2.0 * rep.C_bar);
  c.delta1 = c.zeta1 / 4.0;
  const double b = 4.0 * beta + 2.0 * std::sqrt(static_cast<double>(pb.N));
  c.c2 = b * b / 4.0;
  c.C_H = hessian_frobenius_constant(pb.hamiltonian(), pb.N);
  c.c3 = c.C_H;
  c.c4 = c.C_H;
  return c;
}

/// Sobolev exponent N/(N-2); two-dimensional runs use 3 (any finite exponent embeds).
inline double sobolev_ratio(int N) { return N > 2 ? static_cast<double>(N) / (N - 2) : 3.0; }

/// phi = -2 div(Du w^beta).
template <int Dim>
ScalarField<Dim> thm1_test_function(const SolutionFields<Dim>& s, double beta) {
  VectorField<Dim> v(s.grid);
  for (std::size_t k = 0; k < s.grid.size(); ++k) {
    const double wb = std::pow(s.w[k], beta);
    for (int d = 0; d < Dim; ++d) v.components[d][k] = s.du.components[d][k] * wb;
  }
  auto phi = cell_divergence(v);
  for (double& x : phi.values) x *= -2.0;
  return phi;
}

/// Weak identity  int a(w) Du.Dphi = int (f - lambda u - H(Du)) phi  for phi = -2 div(Du w^beta).
template <int Dim>
LedgerRow weak_identity_check(const ProblemSpec& pb, const ScalarField<Dim>& u, double beta, double c_tol = 1.0,
                              double residual_tolerance = 1e-8) {
  if (!(beta >= 2.0)) throw ParameterError("weak identity check needs beta >= 2");
  require_converged(pb, u, residual_tolerance, "weak_identity_check");
  const auto f = evaluate_source(pb.source, u.grid);
  SolutionFields<Dim> s(pb, u, f);
  const auto phi = thm1_test_function(s, beta);
  const double lhs = cell_energy(s.a, s.du, phi);
  const double rhs = integrate_cells(s.grid, [&](std::size_t k) { return (s.f_eff[k] - s.H[k]) * phi[k]; });
  auto row = make_row("weak_identity", RowKind::Identity, lhs, rhs, u.grid.max_spacing(), c_tol, {{"beta", beta}});
  return row;
}

/// Relative gap |lhs - rhs| / max(|lhs|, |rhs|) of a weak-identity row (0 when both vanish).
inline double relative_gap(const LedgerRow& r) {
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
  return scale > 0.0 ? std::abs(r.lhs - r.rhs) / scale : 0.0;
}

/// Rows diff1, diff2, diff3 (empirical Sobolev constant), rhs, Hphi and corollary.
template <int Dim>
BernsteinLedger thm1_ledger(const ProblemSpec& pb, const ScalarField<Dim>& u, double beta, double c_tol = 1.0,
                            double residual_tolerance = 1e-8) {
  if (!(beta >= 2.0)) throw ParameterError("first proof chain needs beta >= 2");
  require_converged(pb, u, residual_tolerance, "thm1_ledger");
  const auto f = evaluate_source(pb.source, u.grid);
  SolutionFields<Dim> s(pb, u, f);
  const auto& g = s.grid;
  const double h = g.max_spacing();
  const double p = pb.p;
  const double gamma = pb.gamma;
  const auto C = thm1_constants(pb, beta);
  const double cH = kLowerBoundCH;

  const auto phi = thm1_test_function(s, beta);
  const auto dw = gradient(s.w);

  // Shared integrals. Lemma rows pair Du and Dphi on faces, as the solver does.
  const double weak_lhs = adjoint_energy(pb, s, u, phi);
  const double I_aSw = integrate_cells(g, [&](std::size_t k) { return s.a[k] * s.hess_sq[k] * std::pow(s.w[k], beta); });
  const double I_Sw = integrate_cells(g, [&](std::size_t k) { return s.hess_sq[k] * std::pow(s.w[k], beta + 0.5 * (p - 2.0)); });
  const double I_grad = integrate_cells(g, [&](std::size_t k) { return dw.norm_sq(k) * std::pow(s.w[k], beta + 0.5 * p - 2.0); });
  const double I_wg = integrate_cells(g, [&](std::size_t k) { return std::pow(s.w[k], beta + gamma + 0.5 * (2.0 - p)); });
  const double I_f2 = integrate_cells(g, [&](std::size_t k) { return s.f_eff[k] * s.f_eff[k] * std::pow(s.w[k], beta + 0.5 * (2.0 - p)); });
  const double I_fphi = integrate_cells(g, [&](std::size_t k) { return s.f_eff[k] * phi[k]; });
  const double I_Hphi = integrate_cells(g, [&](std::size_t k) { return -s.H[k] * phi[k]; });
  const double sob = sobolev_ratio(pb.N);
  const double I_sob = std::pow(integrate_cells(g, [&](std::size_t k) { return std::pow(s.w[k], (beta + 0.5 * p) * sob); }), 1.0 / sob);

  BernsteinLedger L;
  L.h = h;
  L.c_tol = c_tol;
  L.rows.push_back(make_row("diff1", RowKind::Inequality, weak_lhs, C.zeta1 * I_aSw + beta * C.zeta2 * I_grad, h, c_tol,
                            {{"zeta1", C.zeta1}, {"zeta2", C.zeta2}, {"beta", beta}}));

  L.rows.push_back(make_row("diff2", RowKind::Inequality, C.zeta1 * I_aSw,
                            0.5 * C.zeta1 * C.c_bar * I_Sw + C.c1 * (cH * cH / 8.0 * I_wg - 2.0 * I_f2), h, c_tol,
                            {{"zeta1", C.zeta1}, {"nu", C.nu}, {"c1", C.c1}, {"c_H", cH}}));

  auto d3 = make_row("diff3", RowKind::Empirical, beta * C.zeta2 * I_grad, I_sob, h, c_tol,
                     {{"sobolev_exponent", sob}, {"zeta2", C.zeta2}});
  d3.constants["C_S_hat"] = d3.fitted;
  L.rows.push_back(d3);

  L.rows.push_back(make_row("rhs", RowKind::Inequality, C.delta1 * I_Sw + C.c2 / C.delta1 * I_f2, I_fphi, h, c_tol,
                            {{"delta1", C.delta1}, {"c2", C.c2}}));

  L.rows.push_back(make_row("Hphi", RowKind::Inequality, C.c3 / (beta + 1.0) * I_wg + C.c4 / (beta + 1.0) * I_Sw,
                            I_Hphi, h, c_tol, {{"c3", C.c3}, {"c4", C.c4}}));

  // Corollary with the gradient term kept in its pre-Sobolev form (it dominates the
  // zeta3/zeta4 expression by diff3) and delta1 = zeta1/4.
  const double bound = C.c3 / (beta + 1.0) * I_wg + C.c4 / (beta + 1.0) * I_Sw + (2.0 * C.c1 + C.c2 / C.delta1) * I_f2;
  const double controlled = (0.5 * C.zeta1 * C.c_bar - C.delta1) * I_Sw + C.c1 * cH * cH / 8.0 * I_wg + beta * C.zeta2 * I_grad;
  L.rows.push_back(make_row("corollary", RowKind::Inequality, bound, controlled, h, c_tol,
                            {{"delta1", C.delta1}, {"second_order_integral", I_Sw}}));
  return L;
}

}  // namespace gradest

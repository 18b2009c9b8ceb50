#pragma once

#include <algorithm>
#include <cmath>

#include "gradest/bernstein/fields.hpp"
#include "gradest/bernstein/ledger.hpp"
#include "gradest/model/exponents.hpp"

namespace gradest {

/// Constants of the second proof chain. With a~(v) = a(v^2):
///   C_a~ = sup |v a~'/a~| = sup |2 t a'(t)/a(t)|,  nu2 = sqrt N + C_a~,
///   c10 = c_H^2 / (8 nu2^2 C_bar),  c11 = 2 / (nu2^2 C_bar),
///   |H_xi| <= C_H1 v^{gamma-1} with C_H1 = gamma,  K = C_H1^2/(4 delta),
///   c_I3 = (K/eta) (K/(delta eta'))^{eta-1}  (weighted Young),  c14 = max(c_I3, (N + (beta+1)^2)/(4 delta)).
struct Thm2Constants {
  double c_bar, C_bar, C_a, nu2, c10, c11, delta, C_H1, c_I3, c14;
};

inline Thm2Constants thm2_constants(const ProblemSpec& pb, double beta, double eta, double delta = 0.5) {
  const auto rep = check_structure_conditions(pb.coefficient, pb.eps, std::max(1e6, 10.0 * pb.eps), 1000);
  Thm2Constants c{};
  c.c_bar = rep.c_bar;
  c.C_bar = rep.C_bar;
  c.C_a = rep.C_a;
  c.nu2 = std::sqrt(static_cast<double>(pb.N)) + rep.C_a;
  c.c10 = kLowerBoundCH * kLowerBoundCH / (8.0 * c.nu2 * c.nu2 * rep.C_bar);
  c.c11 = 2.0 / (c.nu2 * c.nu2 * rep.C_bar);
  c.delta = delta;
  c.C_H1 = pb.gamma;
  const double K = c.C_H1 * c.C_H1 / (4.0 * delta);
  const double eta_conj = eta / (eta - 1.0);
  c.c_I3 = (K / eta) * std::pow(K / (delta * eta_conj), eta - 1.0);
  c.c14 = std::max(c.c_I3, (pb.N + (beta + 1.0) * (beta + 1.0)) / (4.0 * delta));
  return c;
}

/// Truncation data at level k: v = sqrt(w), v_k = (v - k)^+, membership of Omega_k by the cell centre test.
template <int Dim>
struct Truncation {
  ScalarField<Dim> v;
  ScalarField<Dim> vk;
  std::vector<char> inside;
  std::size_t count = 0;

  Truncation(const ScalarField<Dim>& w, double k) : v(w.grid), vk(w.grid), inside(w.size(), 0) {
    for (std::size_t c = 0; c < w.size(); ++c) {
      v[c] = std::sqrt(w[c]);
      if (v[c] > k) {
        vk[c] = v[c] - k;
        inside[c] = 1;
        ++count;
      }
    }
  }
  double measure() const { return static_cast<double>(count) * v.grid.cell_volume(); }
};

/// phi = div(Du v_k^beta / v).
template <int Dim>
ScalarField<Dim> thm2_test_function(const SolutionFields<Dim>& s, const Truncation<Dim>& t, double beta) {
  VectorField<Dim> g(s.grid);
  for (std::size_t c = 0; c < s.grid.size(); ++c) {
    const double m = t.inside[c] ? std::pow(t.vk[c], beta) / t.v[c] : 0.0;
    for (int d = 0; d < Dim; ++d) g.components[d][c] = s.du.components[d][c] * m;
  }
  return cell_divergence(g);
}

/// Rows t2s1, t2s2, t2s4 and mainineq (empirical c15) at level k for the exponents of
/// the second proof chain.
template <int Dim>
BernsteinLedger thm2_ledger(const ProblemSpec& pb, const ScalarField<Dim>& u, double k, const Theorem2Exponents& ex,
                            double c_tol = 1.0, double residual_tolerance = 1e-8) {
  if (!(pb.p >= 2.0)) throw ParameterError("second proof chain needs p >= 2");
  if (!(k >= 1.0)) throw ParameterError("second proof chain needs k >= 1");
  if (pb.N < 3) throw ParameterError("second proof chain needs N >= 3");
  require_converged(pb, u, residual_tolerance, "thm2_ledger");
  const double beta = to_double(ex.beta);
  const double eta = to_double(ex.eta);
  const double r = to_double(ex.r);
  const double p = pb.p;
  const double lambda = pb.lambda;
  const int N = pb.N;

  const auto f = evaluate_source(pb.source, u.grid);
  SolutionFields<Dim> s(pb, u, f);
  const auto& g = s.grid;
  const double h = g.max_spacing();
  Truncation<Dim> t(s.w, k);
  const auto C = thm2_constants(pb, beta, eta);

  BernsteinLedger L;
  L.h = h;
  L.c_tol = c_tol;
  auto on_k = [&](auto&& fn) {
    return integrate_cells(g, [&](std::size_t c) { return t.inside[c] ? fn(c) : 0.0; });
  };

  const auto phi = thm2_test_function(s, t, beta);
  const auto dvk = gradient(t.vk);
  const double weak_lhs = -adjoint_energy(pb, s, u, phi);
  const double I_hess = on_k([&](std::size_t c) { return s.a[c] * s.hess_sq[c] * std::pow(t.vk[c], beta) / t.v[c]; });
  const double I_grad = on_k([&](std::size_t c) {
    return std::pow(t.v[c], p - 2.0) * std::pow(t.vk[c], beta - 1.0) * dvk.norm_sq(c);
  });
  L.rows.push_back(make_row("t2s1", RowKind::Inequality, weak_lhs, I_hess + C.c_bar * (beta - 1.0) * I_grad, h, c_tol,
                            {{"c_bar", C.c_bar}, {"beta", beta}, {"k", k}, {"omega_k_measure", t.measure()}}));

  const double I_top = on_k([&](std::size_t c) { return std::pow(t.v[c], 2.0 * pb.gamma + 1.0 - p) * std::pow(t.vk[c], beta); });
  const double I_src = on_k([&](std::size_t c) {
    return s.f_eff[c] * s.f_eff[c] * std::pow(t.vk[c], beta) * std::pow(t.v[c], 1.0 - p);
  });
  L.rows.push_back(make_row("t2s2", RowKind::Inequality, I_hess, C.c10 * I_top - C.c11 * I_src, h, c_tol,
                            {{"c10", C.c10}, {"c11", C.c11}, {"nu", C.nu2}, {"k", k}}));

  // I3 + I4 - I5 = int (H + lambda u - f) phi.
  const double rhs_terms = integrate_cells(g, [&](std::size_t c) { return (s.H[c] - s.f_eff[c]) * phi[c]; });
  const double I_lam = on_k([&](std::size_t c) { return s.du.norm_sq(c) * std::pow(t.vk[c], beta) / t.v[c]; });
  const double I_d3 = on_k([&](std::size_t c) { return s.hess_sq[c] * std::pow(t.v[c], p - 3.0) * std::pow(t.vk[c], beta); });
  const double I_d4 = on_k([&](std::size_t c) { return std::pow(t.vk[c], p + beta - 3.0) * dvk.norm_sq(c); });
  const double I_eta = on_k([&](std::size_t c) { return std::pow(t.vk[c], beta + eta); });
  const double I_f = on_k([&](std::size_t c) { return s.f[c] * s.f[c] * std::pow(t.vk[c], beta + 1.0 - p); });
  const double bound4 = -lambda * I_lam + C.delta * (I_grad + I_top + I_d3 + I_d4) + C.c14 * (I_eta + I_f);
  L.rows.push_back(make_row("t2s4", RowKind::Inequality, bound4, rhs_terms, h, c_tol,
                            {{"delta", C.delta}, {"c14", C.c14}, {"eta", eta}, {"k", k}}));

  const double sob = static_cast<double>(N) / (N - 2);
  const double I_sob = std::pow(on_k([&](std::size_t c) { return std::pow(t.vk[c], (p + beta - 1.0) * sob); }), 1.0 / sob);
  const double data = on_k([&](std::size_t c) { return std::pow(std::abs(s.f[c]), r); }) +
                      on_k([&](std::size_t c) { return std::pow(t.vk[c], (beta + 1.0 - p) * r / (r - 2.0)); }) +
                      lambda * lambda * on_k([&](std::size_t c) {
                        return u[c] * u[c] * std::pow(t.vk[c], beta) * std::pow(t.v[c], 1.0 - p);
                      }) +
                      on_k([&](std::size_t c) { return std::pow(t.vk[c], p + beta - 1.0); }) +
                      on_k([&](std::size_t c) { return std::pow(t.vk[c], beta + 2.0 * pb.gamma - p + 1.0); });
  auto mi = make_row("mainineq", RowKind::Empirical, data, I_sob + lambda * I_lam, h, c_tol, {{"r", r}, {"k", k}});
  mi.constants["c15_hat"] = mi.fitted;
  L.rows.push_back(mi);
  return L;
}

/// As above, deriving the exponents from q; a proof gap is refused.
template <int Dim>
BernsteinLedger thm2_ledger(const ProblemSpec& pb, const ScalarField<Dim>& u, double k, const Rational& q,
                            double c_tol = 1.0, double residual_tolerance = 1e-8) {
  const auto res = theorem2_exponents(pb.N, rational_from_double(pb.p), rational_from_double(pb.gamma), q);
  if (const auto* gap = std::get_if<ProofGap>(&res))
    throw RejectedInput("second proof chain refused: r = " + to_string(gap->r) + " <= 2 (ProofGap)");
  return thm2_ledger(pb, u, k, std::get<Theorem2Exponents>(res), c_tol, residual_tolerance);
}

}  // namespace gradest

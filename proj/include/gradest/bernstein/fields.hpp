#pragma once

#include <cmath>

#include "gradest/solver/discretization.hpp"

namespace gradest {

/// Cell quantities shared by every ledger: Du, w = |Du|^2 + eps, a(w), |D^2u|^2,
/// f and the effective source f - lambda u.
template <int Dim>
struct SolutionFields {
  const Grid<Dim>& grid;
  VectorField<Dim> du;
  ScalarField<Dim> w;
  ScalarField<Dim> a;
  ScalarField<Dim> hess_sq;
  ScalarField<Dim> f;
  ScalarField<Dim> f_eff;
  ScalarField<Dim> H;

  SolutionFields(const ProblemSpec& pb, const ScalarField<Dim>& u, const ScalarField<Dim>& source)
      : grid(u.grid), du(gradient(u)), w(u.grid), a(u.grid), hess_sq(second_derivatives(u).hess_frobenius_sq),
        f(source), f_eff(u.grid), H(u.grid) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      w[k] = du.norm_sq(k) + pb.eps;
      a[k] = eval_diffusion(pb.coefficient, w[k]).a;
      f_eff[k] = f[k] - pb.lambda * u[k];
      H[k] = std::pow(w[k], 0.5 * pb.gamma);
    }
  }
};

/// div V for a cell vector field, through face averages of the normal
/// components and zero flux on the boundary faces.
template <int Dim>
ScalarField<Dim> cell_divergence(const VectorField<Dim>& v) {
  return divergence_flux(FaceField<Dim>(v.grid, 1.0), face_average(v));
}

/// sum_c a_c Du_c . Dphi_c vol with centred cell gradients.
template <int Dim>
double cell_energy(const ScalarField<Dim>& a, const VectorField<Dim>& du, const ScalarField<Dim>& phi) {
  const auto dphi = gradient(phi);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double dot = 0.0;
    for (int d = 0; d < Dim; ++d) dot += du.components[d][k] * dphi.components[d][k];
    s += a[k] * dot;
  }
  return s * a.grid.cell_volume();
}

/// sum_faces a(w_f) (Du)_f (Dphi)_f vol with w_f the face average of w: the pairing
/// that is exactly adjoint to the solver's diffusion term.
template <int Dim>
double adjoint_energy(const ProblemSpec& pb, const SolutionFields<Dim>& s, const ScalarField<Dim>& u,
                      const ScalarField<Dim>& phi) {
  auto coef = face_average(s.w);
  for (auto& axis : coef.faces)
    for (double& v : axis) v = eval_diffusion(pb.coefficient, v).a;
  return face_inner(coef, face_gradient(u), face_gradient(phi));
}

/// Integral of fn(k) over all cells.
template <int Dim, class Fn>
double integrate_cells(const Grid<Dim>& g, Fn&& fn) {
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) s += fn(k);
  return s * g.cell_volume();
}

/// Rejects iterates whose discrete residual exceeds `tolerance`.
template <int Dim>
void require_converged(const ProblemSpec& pb, const ScalarField<Dim>& u, double tolerance, const char* who) {
  DiscreteOperator<Dim> op(pb, u.grid);
  const double r = op.norm(op.residual(u));
  if (!(r <= tolerance))
    throw RejectedInput(std::string(who) + ": iterate is not converged (residual " + std::to_string(r) + ")");
}

}  // namespace gradest

#pragma once

#include <Eigen/Sparse>

#include <cmath>
#include <vector>

#include "gradest/grid/operators.hpp"
#include "gradest/model/problem.hpp"

namespace gradest {

/// Parameters that continuation varies; everything else comes from the ProblemSpec.
struct StageParameters {
  double eps;
  double gamma;
};

/// Finite-volume form of  lambda u - div(a(w) Du) + H(Du) - f,  w = |Du|^2 + eps.
///
/// Cell gradients are centred with mirrored ghosts. Face fluxes use the compact
/// normal difference and a((w_L + w_R)/2); boundary faces carry no flux.
template <int Dim>
class DiscreteOperator {
 public:
  using SparseMatrix = Eigen::SparseMatrix<double>;

  DiscreteOperator(const ProblemSpec& pb, const Grid<Dim>& grid, ScalarField<Dim> f)
      : pb_(pb), grid_(grid), f_(std::move(f)), stage_{pb.eps, pb.gamma} {
    if (!(f_.grid == grid_)) throw ContractError("source field lives on a different grid");
  }

  DiscreteOperator(const ProblemSpec& pb, const Grid<Dim>& grid)
      : DiscreteOperator(pb, grid, evaluate_source(pb.source, grid)) {}

  const Grid<Dim>& grid() const { return grid_; }
  const ProblemSpec& problem() const { return pb_; }
  const ScalarField<Dim>& source() const { return f_; }
  const StageParameters& stage() const { return stage_; }
  void set_stage(const StageParameters& s) { stage_ = s; }

  double hamiltonian_at_origin() const { return std::pow(stage_.eps, 0.5 * stage_.gamma); }

  ScalarField<Dim> residual(const ScalarField<Dim>& u) const {
    if (!(u.grid == grid_)) throw ContractError("iterate does not conform to the problem grid");
    const auto du = gradient(u);
    ScalarField<Dim> w(grid_);
    for (std::size_t k = 0; k < grid_.size(); ++k) w[k] = du.norm_sq(k) + stage_.eps;
    auto coef = face_average(w);
    for (auto& axis : coef.faces)
      for (double& v : axis) v = eval_diffusion(pb_.coefficient, v).a;
    const auto div = divergence_flux(coef, face_gradient(u));
    ScalarField<Dim> r(grid_);
    for (std::size_t k = 0; k < grid_.size(); ++k)
      r[k] = pb_.lambda * u[k] - div[k] + std::pow(w[k], 0.5 * stage_.gamma) - f_[k];
    return r;
  }

  /// Exact derivative of residual(): diffusion linearised through both the
  /// face gradient and the face value of w, Hamiltonian through H_xi.
  SparseMatrix jacobian(const ScalarField<Dim>& u) const {
    const std::size_t n = grid_.size();
    const auto du = gradient(u);
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = du.norm_sq(k) + stage_.eps;

    // dw_c/du_j has 2*Dim entries: neighbours +-1 along each axis.
    struct Entry {
      std::size_t col;
      double val;
    };
    std::vector<std::array<Entry, 2 * Dim>> dw(n);
    for (std::size_t k = 0; k < n; ++k) {
      for (int d = 0; d < Dim; ++d) {
        const double c = du.components[d][k] / grid_.spacing(d);  // 2 G_d / (2h)
        dw[k][2 * d] = {grid_.neighbor(k, d, 1), c};
        dw[k][2 * d + 1] = {grid_.neighbor(k, d, -1), -c};
      }
    }

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n * (1 + 2 * Dim + Dim * 2 * (4 * Dim + 2)));
    const double half_gamma = 0.5 * stage_.gamma;
    for (std::size_t k = 0; k < n; ++k) {
      trip.emplace_back(static_cast<int>(k), static_cast<int>(k), pb_.lambda);
      const double hfac = stage_.gamma * std::pow(w[k], half_gamma - 1.0);
      for (int d = 0; d < Dim; ++d) {
        const double c = hfac * du.components[d][k] * 0.5 / grid_.spacing(d);
        trip.emplace_back(static_cast<int>(k), static_cast<int>(grid_.neighbor(k, d, 1)), c);
        trip.emplace_back(static_cast<int>(k), static_cast<int>(grid_.neighbor(k, d, -1)), -c);
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (int d = 0; d < Dim; ++d) {
        if (grid_.coordinate(k, d) + 1 >= grid_.cells(d)) continue;
        const std::size_t kr = k + grid_.stride(d);
        const double h = grid_.spacing(d);
        const double wf = 0.5 * (w[k] + w[kr]);
        const auto [a, ap] = eval_diffusion(pb_.coefficient, wf);
        const double g = (u[kr] - u[k]) / h;
        const double inv_h = 1.0 / h;
        auto add = [&](std::size_t col, double dF) {
          trip.emplace_back(static_cast<int>(k), static_cast<int>(col), -dF * inv_h);
          trip.emplace_back(static_cast<int>(kr), static_cast<int>(col), dF * inv_h);
        };
        const double s = 0.5 * ap * g;
        for (const auto& e : dw[k]) add(e.col, s * e.val);
        for (const auto& e : dw[kr]) add(e.col, s * e.val);
        add(kr, a * inv_h);
        add(k, -a * inv_h);
      }
    }
    SparseMatrix J(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    J.setFromTriplets(trip.begin(), trip.end());
    J.makeCompressed();
    return J;
  }

  /// Discrete L2 norm (sum r^2 vol)^{1/2}.
  double norm(const ScalarField<Dim>& r) const {
    double s = 0.0;
    for (double v : r.values) s += v * v;
    return std::sqrt(s * grid_.cell_volume());
  }

 private:
  ProblemSpec pb_;
  Grid<Dim> grid_;
  ScalarField<Dim> f_;
  StageParameters stage_;
};

template <int Dim>
ScalarField<Dim> residual(const ProblemSpec& pb, const ScalarField<Dim>& u) {
  return DiscreteOperator<Dim>(pb, u.grid).residual(u);
}

}  // namespace gradest

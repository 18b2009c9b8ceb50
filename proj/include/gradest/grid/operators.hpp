#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "gradest/grid/field.hpp"

namespace gradest {

/// Centred differences (u[i+1] - u[i-1]) / 2h with mirrored ghosts.
template <int Dim>
VectorField<Dim> gradient(const ScalarField<Dim>& u) {
  const auto& g = u.grid;
  VectorField<Dim> du(g);
  for (int d = 0; d < Dim; ++d) {
    const double inv = 0.5 / g.spacing(d);
    auto& c = du.components[d];
    for (std::size_t k = 0; k < g.size(); ++k)
      c[k] = (u[g.neighbor(k, d, 1)] - u[g.neighbor(k, d, -1)]) * inv;
  }
  return du;
}

/// Compact normal difference (u_R - u_L)/h on interior faces; zero on boundary faces.
template <int Dim>
FaceField<Dim> face_gradient(const ScalarField<Dim>& u) {
  const auto& g = u.grid;
  FaceField<Dim> out(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto idx = g.unflat(k);
    for (int d = 0; d < Dim; ++d) {
      if (idx[d] + 1 >= g.cells(d)) continue;
      out.faces[d][out.upper(d, idx)] = (u[k + g.stride(d)] - u[k]) / g.spacing(d);
    }
  }
  return out;
}

/// Arithmetic mean of the two adjacent cells; boundary faces copy the interior cell.
template <int Dim>
FaceField<Dim> face_average(const ScalarField<Dim>& w) {
  const auto& g = w.grid;
  FaceField<Dim> out(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto idx = g.unflat(k);
    for (int d = 0; d < Dim; ++d) {
      if (idx[d] + 1 < g.cells(d))
        out.faces[d][out.upper(d, idx)] = 0.5 * (w[k] + w[k + g.stride(d)]);
      else
        out.faces[d][out.upper(d, idx)] = w[k];
      if (idx[d] == 0) out.faces[d][out.lower(d, idx)] = w[k];
    }
  }
  return out;
}

/// Face average of one component of a cell vector field.
template <int Dim>
FaceField<Dim> face_average(const VectorField<Dim>& v) {
  FaceField<Dim> out(v.grid);
  for (int d = 0; d < Dim; ++d) {
    ScalarField<Dim> comp(v.grid, v.components[d]);
    out.faces[d] = face_average(comp).faces[d];
  }
  return out;
}

/// Net flux per cell divided by the cell volume, flux = coefficient * normal
/// gradient. Boundary faces carry zero flux (homogeneous Neumann).
template <int Dim>
ScalarField<Dim> divergence_flux(const FaceField<Dim>& coefficient, const FaceField<Dim>& grad_normal) {
  if (!coefficient.conforms(grad_normal)) throw ContractError("face arrays do not conform");
  const auto& g = coefficient.grid;
  ScalarField<Dim> div(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto idx = g.unflat(k);
    double s = 0.0;
    for (int d = 0; d < Dim; ++d) {
      const auto& c = coefficient.faces[d];
      const auto& n = grad_normal.faces[d];
      const std::size_t up = coefficient.upper(d, idx);
      const std::size_t lo = coefficient.lower(d, idx);
      const double f_up = idx[d] + 1 < g.cells(d) ? c[up] * n[up] : 0.0;
      const double f_lo = idx[d] > 0 ? c[lo] * n[lo] : 0.0;
      s += (f_up - f_lo) / g.spacing(d);
    }
    div[k] = s;
  }
  return div;
}

/// sum_faces a_f (Du)_f (Dphi)_f vol over interior faces; the discrete adjoint
/// partner of divergence_flux.
template <int Dim>
double face_inner(const FaceField<Dim>& a, const FaceField<Dim>& du, const FaceField<Dim>& dphi) {
  if (!a.conforms(du) || !a.conforms(dphi)) throw ContractError("face arrays do not conform");
  const auto& g = a.grid;
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto idx = g.unflat(k);
    for (int d = 0; d < Dim; ++d) {
      if (idx[d] + 1 >= g.cells(d)) continue;
      const std::size_t f = a.upper(d, idx);
      s += a.faces[d][f] * du.faces[d][f] * dphi.faces[d][f];
    }
  }
  return s * g.cell_volume();
}

/// Symmetric Hessian, stored as Dim x Dim cell fields (entry [i][j] == [j][i]).
template <int Dim>
struct Hessian {
  std::array<std::array<std::vector<double>, Dim>, Dim> entries;
};

template <int Dim>
Hessian<Dim> hessian(const ScalarField<Dim>& u) {
  const auto& g = u.grid;
  Hessian<Dim> H;
  for (int i = 0; i < Dim; ++i)
    for (int j = 0; j < Dim; ++j) H.entries[i][j].assign(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (int i = 0; i < Dim; ++i) {
      const double hi = g.spacing(i);
      H.entries[i][i][k] = (u[g.neighbor(k, i, 1)] - 2.0 * u[k] + u[g.neighbor(k, i, -1)]) / (hi * hi);
      for (int j = i + 1; j < Dim; ++j) {
        const std::size_t pp = g.neighbor(g.neighbor(k, i, 1), j, 1);
        const std::size_t pm = g.neighbor(g.neighbor(k, i, 1), j, -1);
        const std::size_t mp = g.neighbor(g.neighbor(k, i, -1), j, 1);
        const std::size_t mm = g.neighbor(g.neighbor(k, i, -1), j, -1);
        const double v = (u[pp] - u[pm] - u[mp] + u[mm]) / (4.0 * hi * g.spacing(j));
        H.entries[i][j][k] = v;
        H.entries[j][i][k] = v;
      }
    }
  }
  return H;
}

template <int Dim>
struct SecondDerivatives {
  ScalarField<Dim> hess_frobenius_sq;
  ScalarField<Dim> laplacian;
  ScalarField<Dim> infinity_laplacian;  // D^2u Du . Du
};

template <int Dim>
SecondDerivatives<Dim> second_derivatives(const ScalarField<Dim>& u) {
  const auto& g = u.grid;
  const auto H = hessian(u);
  const auto du = gradient(u);
  SecondDerivatives<Dim> out{ScalarField<Dim>(g), ScalarField<Dim>(g), ScalarField<Dim>(g)};
  for (std::size_t k = 0; k < g.size(); ++k) {
    double fro = 0.0, lap = 0.0, inf = 0.0;
    for (int i = 0; i < Dim; ++i) {
      lap += H.entries[i][i][k];
      for (int j = 0; j < Dim; ++j) {
        const double hij = H.entries[i][j][k];
        fro += hij * hij;
        inf += hij * du.components[i][k] * du.components[j][k];
      }
    }
    out.hess_frobenius_sq[k] = fro;
    out.laplacian[k] = lap;
    out.infinity_laplacian[k] = inf;
  }
  return out;
}

/// Midpoint quadrature of a cell field.
template <int Dim>
double integral(const ScalarField<Dim>& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.cell_volume();
}

/// (sum |f|^q vol)^{1/q}.
template <int Dim>
double lp_norm(const ScalarField<Dim>& f, double q) {
  if (!(q >= 1.0)) throw ParameterError("Lebesgue exponent must be >= 1");
  double s = 0.0;
  for (double v : f.values) s += std::pow(std::abs(v), q);
  return std::pow(s * f.grid.cell_volume(), 1.0 / q);
}

template <int Dim>
double max_abs(const ScalarField<Dim>& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

/// One-sided outward differences of a cell field across every boundary face.
template <int Dim>
struct NormalDerivativeScan {
  std::vector<double> values;  // one per boundary face, all faces of all axes
  double max = -std::numeric_limits<double>::infinity();
};

template <int Dim>
NormalDerivativeScan<Dim> normal_derivative_scan(const ScalarField<Dim>& field) {
  const auto& g = field.grid;
  NormalDerivativeScan<Dim> scan;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto idx = g.unflat(k);
    for (int d = 0; d < Dim; ++d) {
      const double h = g.spacing(d);
      if (idx[d] == 0) {
        const double v = -(field[k + g.stride(d)] - field[k]) / h;
        scan.values.push_back(v);
        scan.max = std::max(scan.max, v);
      }
      if (idx[d] == g.cells(d) - 1) {
        const double v = (field[k] - field[k - g.stride(d)]) / h;
        scan.values.push_back(v);
        scan.max = std::max(scan.max, v);
      }
    }
  }
  return scan;
}

}  // namespace gradest

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "gradest/grid/grid.hpp"

namespace gradest {

/// One value per cell. Ghost values are implied by even reflection, so the
/// discrete normal derivative of every ScalarField vanishes on the boundary.
template <int Dim>
struct ScalarField {
  Grid<Dim> grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid<Dim>& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  ScalarField(const Grid<Dim>& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw ContractError("field size does not match grid");
  }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }

  double max() const { return *std::max_element(values.begin(), values.end()); }
  double min() const { return *std::min_element(values.begin(), values.end()); }
};

template <int Dim>
struct VectorField {
  Grid<Dim> grid;
  std::array<std::vector<double>, Dim> components;

  VectorField() = default;
  explicit VectorField(const Grid<Dim>& g) : grid(g) {
    for (auto& c : components) c.assign(g.size(), 0.0);
  }

  double norm_sq(std::size_t k) const {
    double s = 0.0;
    for (const auto& c : components) s += c[k] * c[k];
    return s;
  }

  ScalarField<Dim> magnitude() const {
    ScalarField<Dim> m(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) m[k] = std::sqrt(norm_sq(k));
    return m;
  }
};

/// Values on cell faces normal to each axis. Axis d holds (n_d + 1) faces
/// along d; faces 0 and n_d lie on the boundary.
template <int Dim>
struct FaceField {
  Grid<Dim> grid;
  std::array<std::vector<double>, Dim> faces;
  std::array<std::array<std::size_t, Dim>, Dim> strides{};

  FaceField() = default;
  explicit FaceField(const Grid<Dim>& g, double fill = 0.0) : grid(g) {
    for (int d = 0; d < Dim; ++d) {
      auto shape = g.cells();
      shape[d] += 1;
      std::size_t s = 1;
      for (int e = Dim - 1; e >= 0; --e) {
        strides[d][e] = s;
        s *= static_cast<std::size_t>(shape[e]);
      }
      faces[d].assign(s, fill);
    }
  }

  /// Face on the high side (+1/2) of cell `idx` along `axis`.
  std::size_t upper(int axis, const typename Grid<Dim>::Index& idx) const {
    std::size_t k = 0;
    for (int e = 0; e < Dim; ++e) k += strides[axis][e] * static_cast<std::size_t>(idx[e] + (e == axis ? 1 : 0));
    return k;
  }
  std::size_t lower(int axis, const typename Grid<Dim>::Index& idx) const {
    std::size_t k = 0;
    for (int e = 0; e < Dim; ++e) k += strides[axis][e] * static_cast<std::size_t>(idx[e]);
    return k;
  }

  bool conforms(const FaceField& other) const {
    if (!(grid == other.grid)) return false;
    for (int d = 0; d < Dim; ++d)
      if (faces[d].size() != other.faces[d].size()) return false;
    return true;
  }
};

template <int Dim>
ScalarField<Dim> sample(const Grid<Dim>& grid, const std::function<double(const std::array<double, Dim>&)>& fn) {
  ScalarField<Dim> out(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = fn(grid.center(k));
  return out;
}

}  // namespace gradest

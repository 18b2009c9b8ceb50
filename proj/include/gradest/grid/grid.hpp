#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>

#include "gradest/core/error.hpp"

namespace gradest {

/// Axis-aligned box [0, L_1] x ... x [0, L_N].
template <int Dim>
struct Box {
  static_assert(Dim == 2 || Dim == 3, "boxes are two- or three-dimensional");
  std::array<double, Dim> extents{};

  double volume() const {
    double v = 1.0;
    for (double l : extents) v *= l;
    return v;
  }
};

/// Uniform cell-centred grid on a box. Cells are stored row-major (last axis fastest).
template <int Dim>
class Grid {
 public:
  using Index = std::array<int, Dim>;
  static constexpr int kMinCells = 8;

  Grid() = default;

  Grid(const Box<Dim>& box, const Index& cells) : box_(box), n_(cells) {
    for (int d = 0; d < Dim; ++d) {
      if (!(box.extents[d] > 0.0)) throw ParameterError("box extents must be positive");
      if (n_[d] < kMinCells)
        throw ResolutionError("grid needs at least 8 cells per axis, got " + std::to_string(n_[d]));
      h_[d] = box.extents[d] / n_[d];
    }
    stride_[Dim - 1] = 1;
    for (int d = Dim - 2; d >= 0; --d) stride_[d] = stride_[d + 1] * static_cast<std::size_t>(n_[d + 1]);
    size_ = stride_[0] * static_cast<std::size_t>(n_[0]);
    cell_volume_ = 1.0;
    for (double hd : h_) cell_volume_ *= hd;
  }

  const Box<Dim>& box() const { return box_; }
  const Index& cells() const { return n_; }
  int cells(int axis) const { return n_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  const std::array<double, Dim>& spacing() const { return h_; }
  double max_spacing() const {
    double m = 0.0;
    for (double hd : h_) m = hd > m ? hd : m;
    return m;
  }
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return stride_[axis]; }
  double cell_volume() const { return cell_volume_; }

  std::size_t flat(const Index& idx) const {
    std::size_t k = 0;
    for (int d = 0; d < Dim; ++d) k += stride_[d] * static_cast<std::size_t>(idx[d]);
    return k;
  }

  Index unflat(std::size_t k) const {
    Index idx{};
    for (int d = 0; d < Dim; ++d) {
      idx[d] = static_cast<int>(k / stride_[d]);
      k %= stride_[d];
    }
    return idx;
  }

  std::array<double, Dim> center(const Index& idx) const {
    std::array<double, Dim> x{};
    for (int d = 0; d < Dim; ++d) x[d] = (idx[d] + 0.5) * h_[d];
    return x;
  }

  std::array<double, Dim> center(std::size_t k) const { return center(unflat(k)); }

  /// Flat index of the neighbour at `offset` cells along `axis`, with even
  /// reflection across the box faces (ghost cell -1 is cell 0, ghost n is n-1).
  std::size_t neighbor(std::size_t k, int axis, int offset) const {
    const int i = static_cast<int>((k / stride_[axis]) % static_cast<std::size_t>(n_[axis]));
    const int j = reflect(i + offset, n_[axis]);
    return k + stride_[axis] * static_cast<std::size_t>(j) - stride_[axis] * static_cast<std::size_t>(i);
  }

  int coordinate(std::size_t k, int axis) const {
    return static_cast<int>((k / stride_[axis]) % static_cast<std::size_t>(n_[axis]));
  }

  bool operator==(const Grid& other) const { return box_.extents == other.box_.extents && n_ == other.n_; }

  static int reflect(int i, int n) {
    // Mirror about the faces at -1/2 and n-1/2; repeated for offsets larger than one cell.
    while (i < 0 || i >= n) {
      if (i < 0) i = -1 - i;
      if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
  }

 private:
  Box<Dim> box_{};
  Index n_{};
  std::array<double, Dim> h_{};
  std::array<std::size_t, Dim> stride_{};
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

template <int Dim>
Grid<Dim> build_grid(const Box<Dim>& box, const typename Grid<Dim>::Index& cells) {
  return Grid<Dim>(box, cells);
}

}  // namespace gradest

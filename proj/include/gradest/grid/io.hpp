#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "gradest/grid/field.hpp"

namespace gradest {

// Field snapshot layout (native little-endian):
//   char[4]  magic "GRDF"
//   uint32   version (1)
//   uint32   dimension N
//   uint32   reserved (0)
//   uint64   cells[3]    (unused axes = 1)
//   double   extents[3]  (unused axes = 0)
//   double   spacing[3]  (unused axes = 0)
//   double   values[prod(cells)], row-major, last axis fastest
inline constexpr char kFieldMagic[4] = {'G', 'R', 'D', 'F'};
inline constexpr std::uint32_t kFieldVersion = 1;

template <int Dim>
void write_field(const std::string& path, const ScalarField<Dim>& f) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open field snapshot for writing: " + path);
  const std::uint32_t header[3] = {kFieldVersion, static_cast<std::uint32_t>(Dim), 0};
  std::uint64_t cells[3] = {1, 1, 1};
  double extents[3] = {0, 0, 0};
  double spacing[3] = {0, 0, 0};
  for (int d = 0; d < Dim; ++d) {
    cells[d] = static_cast<std::uint64_t>(f.grid.cells(d));
    extents[d] = f.grid.box().extents[d];
    spacing[d] = f.grid.spacing(d);
  }
  out.write(kFieldMagic, 4);
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(cells), sizeof cells);
  out.write(reinterpret_cast<const char*>(extents), sizeof extents);
  out.write(reinterpret_cast<const char*>(spacing), sizeof spacing);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!out) throw Error("failed writing field snapshot: " + path);
}

template <int Dim>
ScalarField<Dim> read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open field snapshot: " + path);
  char magic[4];
  std::uint32_t header[3];
  std::uint64_t cells[3];
  double extents[3];
  double spacing[3];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(header), sizeof header);
  in.read(reinterpret_cast<char*>(cells), sizeof cells);
  in.read(reinterpret_cast<char*>(extents), sizeof extents);
  in.read(reinterpret_cast<char*>(spacing), sizeof spacing);
  if (!in || std::memcmp(magic, kFieldMagic, 4) != 0) throw Error("not a field snapshot: " + path);
  if (header[0] != kFieldVersion) throw Error("unsupported field snapshot version in " + path);
  if (header[1] != static_cast<std::uint32_t>(Dim)) throw ContractError("snapshot dimension mismatch in " + path);
  Box<Dim> box;
  typename Grid<Dim>::Index n{};
  for (int d = 0; d < Dim; ++d) {
    box.extents[d] = extents[d];
    n[d] = static_cast<int>(cells[d]);
  }
  Grid<Dim> grid(box, n);
  std::vector<double> values(grid.size());
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!in) throw Error("truncated field snapshot: " + path);
  return ScalarField<Dim>(grid, std::move(values));
}

/// Dimension stored in a snapshot header, without reading the payload.
inline int field_dimension(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4];
  std::uint32_t header[3];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in || std::memcmp(magic, kFieldMagic, 4) != 0) throw Error("not a field snapshot: " + path);
  return static_cast<int>(header[1]);
}

}  // namespace gradest

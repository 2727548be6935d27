#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sliceparse/types.hpp"

namespace sliceparse {

struct GridDims {
  int nx = 1, ny = 1, nz = 1;

  int operator[](int a) const { return a == 0 ? nx : (a == 1 ? ny : nz); }
  long long cells() const { return static_cast<long long>(nx) * ny * nz; }
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

/// Binary occupancy grid. Cell (i, j, k) covers
/// [origin + voxel_size * (i, j, k), origin + voxel_size * (i + 1, j + 1, k + 1)).
/// Storage is row-major with k varying fastest, matching the grid dump format.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  explicit VoxelGrid(GridDims dims, double voxel_size = 1.0, Vec3 origin = {});

  /// Empty grid sharing this grid's frame (dims, voxel size, origin).
  VoxelGrid empty_like() const { return VoxelGrid(dims_, voxel_size_, origin_); }

  const GridDims& dims() const { return dims_; }
  double voxel_size() const { return voxel_size_; }
  const Vec3& origin() const { return origin_; }
  bool same_frame(const VoxelGrid& other) const;

  std::size_t flat_index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dims_.ny + j) * dims_.nz + k;
  }
  bool in_bounds(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < dims_.nx && j < dims_.ny && k < dims_.nz;
  }
  bool operator()(int i, int j, int k) const { return cells_[flat_index(i, j, k)] != 0; }
  bool at(Index3 c) const { return (*this)(c.i, c.j, c.k); }
  void set(int i, int j, int k, bool v) { cells_[flat_index(i, j, k)] = v ? 1 : 0; }

  std::size_t count() const;
  bool any() const;

  /// Center of cell (i, j, k) in world units.
  Vec3 cell_center(int i, int j, int k) const;
  /// Cell containing world point p, or nullopt outside the grid.
  std::optional<Index3> world_to_index(Vec3 p) const;
  /// World position of a point given in continuous index units.
  Vec3 index_to_world(Vec3 idx) const { return origin_ + idx * voxel_size_; }

  /// Tight box around occupied cells; nullopt for an empty grid.
  std::optional<Cuboid> bounding_box() const;
  Cuboid full_extent() const;

  const std::vector<std::uint8_t>& cells() const { return cells_; }
  std::vector<std::uint8_t>& cells() { return cells_; }

  friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

 private:
  GridDims dims_;
  double voxel_size_ = 1.0;
  Vec3 origin_{};
  std::vector<std::uint8_t> cells_;
};

}  // namespace sliceparse

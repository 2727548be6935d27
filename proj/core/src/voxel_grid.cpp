#include "sliceparse/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sliceparse {

std::string to_string(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

Axis parse_axis(const std::string& s) {
  if (s == "x" || s == "X" || s == "0") return Axis::X;
  if (s == "y" || s == "Y" || s == "1") return Axis::Y;
  if (s == "z" || s == "Z" || s == "2") return Axis::Z;
  throw std::invalid_argument("unknown axis '" + s + "'");
}

std::string to_string(View v) {
  switch (v) {
    case View::Front: return "front";
    case View::Top: return "top";
    case View::End: return "end";
  }
  return "?";
}

View parse_view(const std::string& s) {
  if (s == "front" || s == "0") return View::Front;
  if (s == "top" || s == "1") return View::Top;
  if (s == "end" || s == "2") return View::End;
  throw std::invalid_argument("unknown view '" + s + "'");
}

std::size_t count_true(const Mask& m) {
  return static_cast<std::size_t>(
      std::count_if(m.data().begin(), m.data().end(), [](std::uint8_t v) { return v != 0; }));
}

VoxelGrid::VoxelGrid(GridDims dims, double voxel_size, Vec3 origin)
    : dims_(dims), voxel_size_(voxel_size), origin_(origin) {
  if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1) {
    throw std::invalid_argument("voxel grid dims must be >= 1");
  }
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw std::invalid_argument("voxel size must be positive and finite");
  }
  cells_.assign(static_cast<std::size_t>(dims.cells()), 0);
}

bool VoxelGrid::same_frame(const VoxelGrid& other) const {
  return dims_ == other.dims_ && voxel_size_ == other.voxel_size_ && origin_ == other.origin_;
}

std::size_t VoxelGrid::count() const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](std::uint8_t v) { return v != 0; }));
}

bool VoxelGrid::any() const {
  return std::any_of(cells_.begin(), cells_.end(), [](std::uint8_t v) { return v != 0; });
}

Vec3 VoxelGrid::cell_center(int i, int j, int k) const {
  return index_to_world({i + 0.5, j + 0.5, k + 0.5});
}

std::optional<Index3> VoxelGrid::world_to_index(Vec3 p) const {
  Index3 idx;
  for (int a = 0; a < 3; ++a) {
    const double t = (p[a] - origin_[a]) / voxel_size_;
    const double f = std::floor(t);
    if (f < 0.0 || f >= dims_[a]) return std::nullopt;
    idx[a] = static_cast<int>(f);
  }
  return idx;
}

std::optional<Cuboid> VoxelGrid::bounding_box() const {
  Cuboid box{{dims_.nx, dims_.ny, dims_.nz}, {-1, -1, -1}};
  bool found = false;
  for (int i = 0; i < dims_.nx; ++i) {
    for (int j = 0; j < dims_.ny; ++j) {
      const std::uint8_t* row = &cells_[flat_index(i, j, 0)];
      for (int k = 0; k < dims_.nz; ++k) {
        if (!row[k]) continue;
        found = true;
        box.min_corner = {std::min(box.min_corner.i, i), std::min(box.min_corner.j, j),
                          std::min(box.min_corner.k, k)};
        box.max_corner = {std::max(box.max_corner.i, i), std::max(box.max_corner.j, j),
                          std::max(box.max_corner.k, k)};
      }
    }
  }
  if (!found) return std::nullopt;
  return box;
}

Cuboid VoxelGrid::full_extent() const {
  return {{0, 0, 0}, {dims_.nx - 1, dims_.ny - 1, dims_.nz - 1}};
}

}  // namespace sliceparse

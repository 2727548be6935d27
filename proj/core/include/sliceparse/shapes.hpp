#pragma once

#include <span>
#include <string>
#include <vector>

#include "sliceparse/mesh.hpp"
#include "sliceparse/types.hpp"
#include "sliceparse/voxel_grid.hpp"

namespace sliceparse {

// Synthetic solids built from axis-aligned boxes (and cylinders) directly on
// a cubic grid, so tests and experiments need no external data.

struct NamedShape {
  std::string name;
  VoxelGrid grid;
};

/// Union of inclusive cell boxes in an n³ grid.
VoxelGrid box_union(int n, std::span<const Cuboid> boxes);

/// Half-open helper: cells [x0, x1) x [y0, y1) x [z0, z1).
Cuboid cells(int x0, int x1, int y0, int y1, int z0, int z1);

/// Cells whose centers lie within `radius` of the axis through
/// (center_u, center_v), for plane indices [lo, hi) along `axis`.
VoxelGrid cylinder_grid(int n, Axis axis, double center_u, double center_v, double radius, int lo, int hi);

/// Names accepted by make_shape: box, cube, l, l_y, t, t_y, plus, plus_y,
/// dumbbell, dumbbell_uneven, l_thick, t_offset, cylinder.
std::vector<std::string> shape_names();

/// Throws std::invalid_argument for an unknown name or n < 16.
NamedShape make_shape(const std::string& name, int n = 32);

/// The fixed ten-shape experiment set: L, T, plus and dumbbell variants.
std::vector<NamedShape> experiment_set(int n = 32);

/// Closed axis-aligned box, 12 outward-facing triangles.
TriMesh box_mesh(Vec3 lo, Vec3 hi);
/// Closed prism approximating a cylinder along Z.
TriMesh cylinder_mesh(double radius, double height, int segments);
/// Welded voxel boundary in grid units, closed for solids without
/// diagonal-only contacts.
TriMesh grid_mesh(const VoxelGrid& grid);

}  // namespace sliceparse

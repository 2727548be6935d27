#pragma once

#include <cstdint>
#include <vector>

#include "sliceparse/mesh.hpp"
#include "sliceparse/types.hpp"
#include "sliceparse/voxel_grid.hpp"

namespace sliceparse {

struct CrossSection {
  Axis axis = Axis::Z;
  int plane_index = 0;
  /// Rows and columns follow perpendicular_axes(axis).
  Mask mask;
};

struct ProjectionImage {
  View view = View::Top;
  Mask pixels;
};

// ---------------------------------------------------------------------------
// Voxelization

/// Occupancy of the cell centers of a cubic-cell grid fitted to the mesh
/// bounds, `resolution` cells along the longest extent.
/// Throws on empty or non-watertight input and on resolution < 2.
VoxelGrid voxelize(const TriMesh& mesh, int resolution);

/// Occupancy of `frame`'s cell centers (frame occupancy is ignored).
/// An empty mesh yields an empty grid.
///
/// Parity ray casting along +X. A ray that touches a triangle edge or vertex
/// exactly is recast from a slightly shifted origin (in Y and Z) until the hit
/// is unambiguous; a crossing exactly at a cell center counts as lying before it.
VoxelGrid voxelize_into(const TriMesh& mesh, const VoxelGrid& frame);

// ---------------------------------------------------------------------------
// Slices and projections

/// Layers nearest the fractions (i + 0.5) / count of the axis extent.
std::vector<int> slice_planes(int extent, int count);
Mask slice_mask(const VoxelGrid& grid, Axis axis, int plane_index);
std::vector<CrossSection> extract_slices(const VoxelGrid& grid, Axis axis, int count);

ProjectionImage project(const VoxelGrid& grid, View view);

// ---------------------------------------------------------------------------
// Metrics

/// |A ∩ B| / |A ∪ B|; 1.0 when both grids are empty.
double volume_iou(const VoxelGrid& a, const VoxelGrid& b);

/// Occupied cells 6-adjacent to an empty or out-of-bounds cell.
VoxelGrid surface_shell(const VoxelGrid& grid);
/// Dilation by the 26-neighborhood, `radius` times.
VoxelGrid dilate26(const VoxelGrid& grid, int radius = 1);
/// volume_iou of the 1-cell-dilated surface shells.
double surface_iou(const VoxelGrid& a, const VoxelGrid& b);

inline constexpr std::uint64_t kChamferSeed = 0x5eedc0ffeeULL;

/// Area-uniform surface samples drawn with a seeded generator.
std::vector<Vec3> sample_surface(const TriMesh& mesh, int samples, std::uint64_t seed);

/// Symmetric Chamfer distance with L1 point distance:
/// ½·mean_a min_b |p_a − p_b|₁ + ½·mean_b min_a |p_b − p_a|₁.
double chamfer_l1(const TriMesh& a, const TriMesh& b, int samples,
                  std::uint64_t seed_a = kChamferSeed, std::uint64_t seed_b = kChamferSeed);
double chamfer_l1_points(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

// ---------------------------------------------------------------------------
// 2D components and clipping

/// 4-connected components, largest first; ties broken by the smallest
/// (row, col) member. Members within a component are in row-major order.
std::vector<std::vector<Pixel>> connected_components(const Mask& mask);

/// Label image (-1 background, otherwise index into connected_components order).
Image<int> label_components(const Mask& mask);
int count_components(const Mask& mask);

/// Same frame; cells outside `box` cleared.
VoxelGrid clip(const VoxelGrid& grid, const Cuboid& box);

/// Cells set in `a` and not in `b` (same frame).
VoxelGrid subtract(const VoxelGrid& a, const VoxelGrid& b);

/// Outward-facing unit squares between occupied cells and empty (or outside)
/// cells, two triangles each, in world units. Vertices are not shared.
TriMesh boundary_mesh(const VoxelGrid& grid);

}  // namespace sliceparse

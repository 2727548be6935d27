#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sliceparse/corners.hpp"
#include "sliceparse/mesh.hpp"
#include "sliceparse/types.hpp"
#include "sliceparse/voxel_grid.hpp"

namespace sliceparse::cli {

struct BundleShape {
  std::string name;
  /// Mesh path, or "synthetic:<name>".
  std::string source;
  VoxelGrid grid;
  /// Ground-truth surface in world units, used for Chamfer distances.
  TriMesh reference;
};

// Directory layout:
//   bundle.json                        resolution, slicing, shape list, frames
//   shapes/<name>/grid.bin             grid dump
//   shapes/<name>/reference.obj
//   shapes/<name>/{front,top,end}.pgm  projections
//   shapes/<name>/corners_<view>.csv   row,col,response
//   shapes/<name>/slices/<axis>_<plane>.pgm
struct Bundle {
  int resolution = 32;
  Axis slice_axis = Axis::Z;
  int slice_count = 12;
  std::vector<BundleShape> shapes;

  const BundleShape& find(const std::string& name) const;
};

void write_bundle(const Bundle& bundle, const std::filesystem::path& dir, const HarrisParams& harris);
Bundle read_bundle(const std::filesystem::path& dir);

std::vector<VoxelGrid> grids_of(const Bundle& bundle);

}  // namespace sliceparse::cli

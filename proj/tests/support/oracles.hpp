#pragma once

// Slow reference implementations used as test oracles.
// None of these call into the code they check.

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "sliceparse/types.hpp"
#include "sliceparse/voxel_grid.hpp"

namespace sliceparse::oracle {

/// Cells set with probability `density`, optionally smoothed into blobs.
VoxelGrid random_grid(std::mt19937_64& rng, int n, double density);

/// A few random boxes unioned together; never empty.
VoxelGrid random_blocks(std::mt19937_64& rng, int n, int boxes);

Mask random_mask(std::mt19937_64& rng, int rows, int cols, double density);

double volume_iou(const VoxelGrid& a, const VoxelGrid& b);

/// Occupied cells with at least one of the six face neighbors empty or outside.
VoxelGrid surface_shell(const VoxelGrid& g);

/// Cells within Chebyshev distance 1 of an occupied cell.
VoxelGrid dilate_once(const VoxelGrid& g);

double surface_iou(const VoxelGrid& a, const VoxelGrid& b);

/// 4-connected components as sets of (row, col), found with union-find.
std::set<std::set<std::pair<int, int>>> components(const Mask& m);

/// O(|a|·|b|) symmetric mean nearest-neighbor L1 distance.
double chamfer_l1(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

}  // namespace sliceparse::oracle

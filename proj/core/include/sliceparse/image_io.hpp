#pragma once

#include <filesystem>
#include <iosfwd>

#include "sliceparse/types.hpp"
#include "sliceparse/voxel_grid.hpp"

namespace sliceparse {

// Grid dump: three little-endian uint32 dims (nx, ny, nz) followed by
// nx*ny*nz bytes in {0, 1}, row-major with k fastest. Frame metadata
// (voxel size, origin) is not part of the format.
void write_grid_dump(const VoxelGrid& grid, std::ostream& out);
void write_grid_dump(const VoxelGrid& grid, const std::filesystem::path& path);
VoxelGrid read_grid_dump(std::istream& in, double voxel_size = 1.0, Vec3 origin = {});
VoxelGrid read_grid_dump(const std::filesystem::path& path, double voxel_size = 1.0,
                         Vec3 origin = {});

/// Binary PGM (P5, maxval 255); true pixels are written as 255.
void write_pgm(const Mask& mask, const std::filesystem::path& path);
void write_pgm(const Image<std::uint8_t>& gray, std::ostream& out, bool binary_mask);
/// Reads a P5 PGM; pixels > 127 become true.
Mask read_pgm_mask(const std::filesystem::path& path);

}  // namespace sliceparse

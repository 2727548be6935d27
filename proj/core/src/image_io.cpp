#include "sliceparse/image_io.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sliceparse {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff),
                              static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) throw std::runtime_error("grid dump: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_grid_dump(const VoxelGrid& grid, std::ostream& out) {
  put_u32(out, static_cast<std::uint32_t>(grid.dims().nx));
  put_u32(out, static_cast<std::uint32_t>(grid.dims().ny));
  put_u32(out, static_cast<std::uint32_t>(grid.dims().nz));
  const auto& cells = grid.cells();
  out.write(reinterpret_cast<const char*>(cells.data()), static_cast<std::streamsize>(cells.size()));
}

void write_grid_dump(const VoxelGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_grid_dump(grid, out);
}

VoxelGrid read_grid_dump(std::istream& in, double voxel_size, Vec3 origin) {
  const auto nx = get_u32(in);
  const auto ny = get_u32(in);
  const auto nz = get_u32(in);
  constexpr std::uint32_t kMaxDim = 1u << 14;
  if (nx == 0 || ny == 0 || nz == 0 || nx > kMaxDim || ny > kMaxDim || nz > kMaxDim) {
    throw std::runtime_error("grid dump: invalid dims");
  }
  VoxelGrid grid({static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz)}, voxel_size,
                 origin);
  auto& cells = grid.cells();
  in.read(reinterpret_cast<char*>(cells.data()), static_cast<std::streamsize>(cells.size()));
  if (in.gcount() != static_cast<std::streamsize>(cells.size())) {
    throw std::runtime_error("grid dump: truncated payload");
  }
  for (auto v : cells) {
    if (v > 1) throw std::runtime_error("grid dump: payload byte outside {0,1}");
  }
  return grid;
}

VoxelGrid read_grid_dump(const std::filesystem::path& path, double voxel_size, Vec3 origin) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_grid_dump(in, voxel_size, origin);
}

void write_pgm(const Image<std::uint8_t>& gray, std::ostream& out, bool binary_mask) {
  out << "P5\n" << gray.cols() << ' ' << gray.rows() << "\n255\n";
  for (auto v : gray.data()) {
    const auto byte = static_cast<char>(binary_mask ? (v ? 255 : 0) : v);
    out.put(byte);
  }
}

void write_pgm(const Mask& mask, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_pgm(mask, out, true);
}

Mask read_pgm_mask(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string magic;
  int cols = 0, rows = 0, maxval = 0;
  in >> magic >> cols >> rows >> maxval;
  if (magic != "P5" || cols <= 0 || rows <= 0 || maxval != 255) {
    throw std::runtime_error(path.string() + ": unsupported PGM header");
  }
  in.get();
  Mask mask(rows, cols);
  for (auto& v : mask.data()) {
    const int byte = in.get();
    if (byte == EOF) throw std::runtime_error(path.string() + ": truncated PGM");
    v = byte > 127 ? 1 : 0;
  }
  return mask;
}

}  // namespace sliceparse

#include "sliceparse/shapes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sliceparse/geomcore.hpp"

namespace sliceparse {

Cuboid cells(int x0, int x1, int y0, int y1, int z0, int z1) {
  return {{x0, y0, z0}, {x1 - 1, y1 - 1, z1 - 1}};
}

VoxelGrid box_union(int n, std::span<const Cuboid> boxes) {
  VoxelGrid g(GridDims{n, n, n});
  for (const auto& b : boxes) {
    for (int i = std::max(0, b.min_corner.i); i <= std::min(n - 1, b.max_corner.i); ++i) {
      for (int j = std::max(0, b.min_corner.j); j <= std::min(n - 1, b.max_corner.j); ++j) {
        for (int k = std::max(0, b.min_corner.k); k <= std::min(n - 1, b.max_corner.k); ++k) g.set(i, j, k, true);
      }
    }
  }
  return g;
}

VoxelGrid cylinder_grid(int n, Axis axis, double center_u, double center_v, double radius, int lo, int hi) {
  VoxelGrid g(GridDims{n, n, n});
  const int a = axis_index(axis);
  const auto [u, v] = perpendicular_axes(axis);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const Index3 idx{i, j, k};
        if (idx[a] < lo || idx[a] >= hi) continue;
        const double du = idx[u] + 0.5 - center_u, dv = idx[v] + 0.5 - center_v;
        if (du * du + dv * dv <= radius * radius) g.set(i, j, k, true);
      }
    }
  }
  return g;
}

std::vector<std::string> shape_names() {
  return {"box", "cube", "l", "l_y", "t", "t_y", "plus", "plus_y", "dumbbell", "dumbbell_uneven",
          "l_thick", "t_offset", "cylinder"};
}

namespace {

// Coordinates below are for a 32³ grid and scaled to n.
int s(int v, int n) { return static_cast<int>(std::lround(v * n / 32.0)); }

VoxelGrid scaled(int n, std::initializer_list<std::array<int, 6>> boxes) {
  std::vector<Cuboid> out;
  for (const auto& b : boxes) out.push_back(cells(s(b[0], n), s(b[1], n), s(b[2], n), s(b[3], n), s(b[4], n), s(b[5], n)));
  return box_union(n, out);
}

}  // namespace

NamedShape make_shape(const std::string& name, int n) {
  if (n < 16) throw std::invalid_argument("synthetic shapes need a grid of at least 16 cells");
  NamedShape out{name, {}};
  // Boxes as {x0, x1, y0, y1, z0, z1}, half-open.
  if (name == "box") {
    out.grid = scaled(n, {{6, 26, 9, 23, 4, 28}});
  } else if (name == "cube") {
    out.grid = scaled(n, {{4, 28, 4, 28, 4, 28}});
  } else if (name == "l") {
    out.grid = scaled(n, {{2, 10, 10, 22, 2, 30}, {2, 30, 10, 22, 2, 10}});
  } else if (name == "l_y") {
    out.grid = scaled(n, {{10, 22, 2, 10, 2, 30}, {10, 22, 2, 30, 2, 10}});
  } else if (name == "t") {
    out.grid = scaled(n, {{12, 20, 12, 20, 2, 22}, {2, 30, 12, 20, 22, 30}});
  } else if (name == "t_y") {
    out.grid = scaled(n, {{12, 20, 12, 20, 2, 22}, {12, 20, 2, 30, 22, 30}});
  } else if (name == "plus") {
    out.grid = scaled(n, {{12, 20, 10, 22, 2, 30}, {2, 30, 10, 22, 12, 20}});
  } else if (name == "plus_y") {
    out.grid = scaled(n, {{10, 22, 12, 20, 2, 30}, {10, 22, 2, 30, 12, 20}});
  } else if (name == "dumbbell") {
    out.grid = scaled(n, {{4, 28, 4, 28, 2, 11}, {13, 19, 13, 19, 11, 21}, {4, 28, 4, 28, 21, 30}});
  } else if (name == "dumbbell_uneven") {
    out.grid = scaled(n, {{6, 26, 6, 26, 2, 9}, {13, 19, 13, 19, 9, 17}, {3, 29, 3, 29, 17, 30}});
  } else if (name == "l_thick") {
    out.grid = scaled(n, {{2, 14, 8, 24, 2, 30}, {2, 30, 8, 24, 2, 12}});
  } else if (name == "t_offset") {
    out.grid = scaled(n, {{4, 12, 12, 20, 2, 20}, {2, 30, 10, 22, 20, 30}});
  } else if (name == "cylinder") {
    out.grid = cylinder_grid(n, Axis::Z, n / 2.0, n / 2.0, 0.375 * n, s(3, n), s(29, n));
  } else {
    throw std::invalid_argument("unknown synthetic shape '" + name + "'");
  }
  return out;
}

std::vector<NamedShape> experiment_set(int n) {
  std::vector<NamedShape> out;
  for (const char* name : {"l", "l_y", "l_thick", "t", "t_y", "t_offset", "plus", "plus_y", "dumbbell",
                           "dumbbell_uneven"}) {
    out.push_back(make_shape(name, n));
  }
  return out;
}

TriMesh box_mesh(Vec3 lo, Vec3 hi) {
  TriMesh m;
  for (int c = 0; c < 8; ++c) {
    m.vertices.push_back({(c & 1) ? hi.x : lo.x, (c & 2) ? hi.y : lo.y, (c & 4) ? hi.z : lo.z});
  }
  // Corner c has bits (x, y, z); faces wound counter-clockwise seen from outside.
  m.triangles = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                 {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
  return m;
}

TriMesh cylinder_mesh(double radius, double height, int segments) {
  if (segments < 3) throw std::invalid_argument("cylinder needs at least 3 segments");
  TriMesh m;
  const auto n = static_cast<std::uint32_t>(segments);
  for (int z = 0; z < 2; ++z) {
    for (std::uint32_t i = 0; i < n; ++i) {
      const double t = 2.0 * std::numbers::pi * i / n;
      m.vertices.push_back({radius * std::cos(t), radius * std::sin(t), z * height});
    }
  }
  m.vertices.push_back({0.0, 0.0, 0.0});
  m.vertices.push_back({0.0, 0.0, height});
  const std::uint32_t bottom = 2 * n, top = 2 * n + 1;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = (i + 1) % n;
    m.triangles.push_back({i, j, n + j});
    m.triangles.push_back({i, n + j, n + i});
    m.triangles.push_back({bottom, j, i});
    m.triangles.push_back({top, n + i, n + j});
  }
  return m;
}

TriMesh grid_mesh(const VoxelGrid& grid) { return weld_exact(boundary_mesh(grid)); }

}  // namespace sliceparse

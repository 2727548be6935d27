#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sliceparse/types.hpp"

namespace sliceparse {

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle soup. Closed meshes have every undirected edge shared by
/// exactly two triangles.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;

  bool empty() const { return triangles.empty(); }

  /// Appends `other`, offsetting its indices.
  void append(const TriMesh& other);

  friend bool operator==(const TriMesh&, const TriMesh&) = default;
};

struct Bounds3 {
  Vec3 min;
  Vec3 max;
};

Bounds3 bounds(const TriMesh& mesh);

double triangle_area(const TriMesh& mesh, const Triangle& t);
double surface_area(const TriMesh& mesh);

/// Signed enclosed volume by the divergence theorem; positive for outward winding.
double signed_volume(const TriMesh& mesh);

/// Every undirected edge is used by exactly two triangles.
bool is_edge_manifold(const TriMesh& mesh);

/// Every edge shared by two triangles is traversed in opposite directions.
bool has_consistent_winding(const TriMesh& mesh);

/// Throws std::invalid_argument on out-of-range indices or zero-area triangles.
void validate(const TriMesh& mesh, double min_area = 1e-14);

void flip_winding(TriMesh& mesh);

/// Merges vertices that are bitwise identical.
TriMesh weld_exact(const TriMesh& mesh);

/// Reads OBJ or OFF depending on the extension.
TriMesh read_mesh(const std::filesystem::path& path);
TriMesh read_obj(std::istream& in);
TriMesh read_off(std::istream& in);
void write_obj(const TriMesh& mesh, const std::filesystem::path& path);
void write_obj(const TriMesh& mesh, std::ostream& out);

}  // namespace sliceparse

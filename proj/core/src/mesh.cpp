#include "sliceparse/mesh.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace sliceparse {

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

void TriMesh::append(const TriMesh& other) {
  const auto offset = static_cast<std::uint32_t>(vertices.size());
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  triangles.reserve(triangles.size() + other.triangles.size());
  for (const auto& t : other.triangles) {
    triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
  }
}

Bounds3 bounds(const TriMesh& mesh) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Bounds3 b{{inf, inf, inf}, {-inf, -inf, -inf}};
  for (const auto& v : mesh.vertices) {
    for (int a = 0; a < 3; ++a) {
      b.min[a] = std::min(b.min[a], v[a]);
      b.max[a] = std::max(b.max[a], v[a]);
    }
  }
  return b;
}

double triangle_area(const TriMesh& mesh, const Triangle& t) {
  const Vec3& a = mesh.vertices[t[0]];
  const Vec3& b = mesh.vertices[t[1]];
  const Vec3& c = mesh.vertices[t[2]];
  return 0.5 * norm(cross(b - a, c - a));
}

double surface_area(const TriMesh& mesh) {
  double total = 0.0;
  for (const auto& t : mesh.triangles) total += triangle_area(mesh, t);
  return total;
}

double signed_volume(const TriMesh& mesh) {
  double v = 0.0;
  for (const auto& t : mesh.triangles) {
    v += dot(mesh.vertices[t[0]], cross(mesh.vertices[t[1]], mesh.vertices[t[2]]));
  }
  return v / 6.0;
}

bool is_edge_manifold(const TriMesh& mesh) {
  std::unordered_map<std::uint64_t, int> uses;
  uses.reserve(mesh.triangles.size() * 3);
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) ++uses[edge_key(t[e], t[(e + 1) % 3])];
  }
  return std::all_of(uses.begin(), uses.end(), [](const auto& kv) { return kv.second == 2; });
}

bool has_consistent_winding(const TriMesh& mesh) {
  // Directed edge a->b must appear at most once, and its reverse must exist.
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.triangles.size() * 3);
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const std::uint64_t key = (static_cast<std::uint64_t>(t[e]) << 32) | t[(e + 1) % 3];
      if (++directed[key] > 1) return false;
    }
  }
  for (const auto& [key, n] : directed) {
    const std::uint64_t rev = (key << 32) | (key >> 32);
    if (!directed.contains(rev)) return false;
  }
  return true;
}

void validate(const TriMesh& mesh, double min_area) {
  const auto n = mesh.vertices.size();
  for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
    const auto& t = mesh.triangles[f];
    for (auto idx : t) {
      if (idx >= n) {
        throw std::invalid_argument("triangle " + std::to_string(f) + " references vertex " +
                                    std::to_string(idx) + " out of range");
      }
    }
    if (triangle_area(mesh, t) <= min_area) {
      throw std::invalid_argument("triangle " + std::to_string(f) + " is degenerate");
    }
  }
}

void flip_winding(TriMesh& mesh) {
  for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
}

TriMesh weld_exact(const TriMesh& mesh) {
  auto less = [](const Vec3& a, const Vec3& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
  };
  std::map<Vec3, std::uint32_t, decltype(less)> index(less);
  TriMesh out;
  std::vector<std::uint32_t> remap(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    auto [it, inserted] =
        index.emplace(mesh.vertices[i], static_cast<std::uint32_t>(out.vertices.size()));
    if (inserted) out.vertices.push_back(mesh.vertices[i]);
    remap[i] = it->second;
  }
  out.triangles.reserve(mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    out.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
  }
  return out;
}

}  // namespace sliceparse

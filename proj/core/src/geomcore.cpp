#include "sliceparse/geomcore.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sliceparse {

// ---------------------------------------------------------------------------
// Voxelization

namespace {

constexpr int kMaxRayAttempts = 16;
// Edge functions below this magnitude (index units squared) count as a touch.
constexpr double kTouchEps = 1e-9;

struct RayShift {
  double dy, dz;
};

RayShift ray_shift(int attempt) {
  // Small incommensurate offsets, in cells.
  return {attempt * 7.0710678e-4, attempt * 5.7735027e-4};
}

double orient2d(double ux, double uy, double vx, double vy, double px, double py) {
  return (vx - ux) * (py - uy) - (vy - uy) * (px - ux);
}

}  // namespace

VoxelGrid voxelize_into(const TriMesh& mesh, const VoxelGrid& frame) {
  VoxelGrid out = frame.empty_like();
  if (mesh.empty()) return out;
  if (!is_edge_manifold(mesh)) throw std::invalid_argument("non-watertight input");

  const GridDims d = frame.dims();
  const double inv_h = 1.0 / frame.voxel_size();
  std::vector<Vec3> p(mesh.vertices.size());
  for (std::size_t v = 0; v < p.size(); ++v) p[v] = (mesh.vertices[v] - frame.origin()) * inv_h;

  const std::size_t ray_count = static_cast<std::size_t>(d.ny) * d.nz;
  std::vector<std::vector<double>> crossings(ray_count);
  // attempt number at which each ray is (re)cast; -1 once resolved.
  std::vector<int> pending(ray_count, 0);
  std::vector<std::uint8_t> touched(ray_count, 0);

  for (int attempt = 0; attempt < kMaxRayAttempts; ++attempt) {
    const RayShift shift = ray_shift(attempt);
    bool any_pending = false;
    for (auto a : pending) any_pending |= (a == attempt);
    if (!any_pending) break;

    for (const auto& tri : mesh.triangles) {
      const Vec3& a = p[tri[0]];
      const Vec3& b = p[tri[1]];
      const Vec3& c = p[tri[2]];
      const double area = orient2d(a.y, a.z, b.y, b.z, c.y, c.z);
      if (area == 0.0) continue;  // parallel to the ray direction
      const double ymin = std::min({a.y, b.y, c.y}), ymax = std::max({a.y, b.y, c.y});
      const double zmin = std::min({a.z, b.z, c.z}), zmax = std::max({a.z, b.z, c.z});
      const int j0 = std::max(0, static_cast<int>(std::ceil(ymin - 0.5 - shift.dy - 1e-7)));
      const int j1 = std::min(d.ny - 1, static_cast<int>(std::floor(ymax - 0.5 - shift.dy + 1e-7)));
      const int k0 = std::max(0, static_cast<int>(std::ceil(zmin - 0.5 - shift.dz - 1e-7)));
      const int k1 = std::min(d.nz - 1, static_cast<int>(std::floor(zmax - 0.5 - shift.dz + 1e-7)));
      const double sgn = area > 0 ? 1.0 : -1.0;
      for (int j = j0; j <= j1; ++j) {
        const double py = j + 0.5 + shift.dy;
        for (int k = k0; k <= k1; ++k) {
          const std::size_t r = static_cast<std::size_t>(j) * d.nz + k;
          if (pending[r] != attempt) continue;
          const double pz = k + 0.5 + shift.dz;
          const double e0 = sgn * orient2d(b.y, b.z, c.y, c.z, py, pz);
          const double e1 = sgn * orient2d(c.y, c.z, a.y, a.z, py, pz);
          const double e2 = sgn * orient2d(a.y, a.z, b.y, b.z, py, pz);
          if (e0 < -kTouchEps || e1 < -kTouchEps || e2 < -kTouchEps) continue;
          if (e0 <= kTouchEps || e1 <= kTouchEps || e2 <= kTouchEps) {
            touched[r] = 1;
            continue;
          }
          const double w = e0 + e1 + e2;
          crossings[r].push_back((e0 * a.x + e1 * b.x + e2 * c.x) / w);
        }
      }
    }

    for (std::size_t r = 0; r < ray_count; ++r) {
      if (pending[r] != attempt) continue;
      if (touched[r] && attempt + 1 < kMaxRayAttempts) {
        touched[r] = 0;
        crossings[r].clear();
        pending[r] = attempt + 1;
      } else {
        pending[r] = -1;
      }
    }
  }

  for (int j = 0; j < d.ny; ++j) {
    for (int k = 0; k < d.nz; ++k) {
      auto& xs = crossings[static_cast<std::size_t>(j) * d.nz + k];
      if (xs.empty()) continue;
      std::sort(xs.begin(), xs.end());
      std::size_t passed = 0;
      for (int i = 0; i < d.nx; ++i) {
        const double xc = i + 0.5;
        while (passed < xs.size() && xs[passed] <= xc) ++passed;
        if (passed % 2 == 1) out.set(i, j, k, true);
      }
    }
  }
  return out;
}

VoxelGrid voxelize(const TriMesh& mesh, int resolution) {
  if (resolution < 2) throw std::invalid_argument("voxelize: resolution must be >= 2");
  if (mesh.empty()) throw std::invalid_argument("voxelize: empty mesh");
  if (!is_edge_manifold(mesh)) throw std::invalid_argument("non-watertight input");
  const Bounds3 b = bounds(mesh);
  double extent = 0.0;
  for (int a = 0; a < 3; ++a) extent = std::max(extent, b.max[a] - b.min[a]);
  if (!(extent > 0.0)) throw std::invalid_argument("voxelize: mesh has zero extent");
  const double h = extent / resolution;
  GridDims dims;
  int n[3];
  for (int a = 0; a < 3; ++a) {
    n[a] = std::clamp(static_cast<int>(std::ceil((b.max[a] - b.min[a]) / h - 1e-9)), 1,
                      resolution);
  }
  dims = {n[0], n[1], n[2]};
  return voxelize_into(mesh, VoxelGrid(dims, h, b.min));
}

// ---------------------------------------------------------------------------
// Slices and projections

std::vector<int> slice_planes(int extent, int count) {
  if (count <= 0) throw std::invalid_argument("slice count must be positive");
  if (count > extent) {
    throw std::invalid_argument("slice count " + std::to_string(count) +
                                " exceeds axis extent " + std::to_string(extent));
  }
  std::vector<int> planes(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    // floor(((i + 0.5) / count) * extent): the layer whose center is nearest.
    const long long num = static_cast<long long>(2 * i + 1) * extent;
    planes[static_cast<std::size_t>(i)] = static_cast<int>(num / (2LL * count));
  }
  return planes;
}

Mask slice_mask(const VoxelGrid& grid, Axis axis, int plane_index) {
  const int a = axis_index(axis);
  const auto [u, v] = perpendicular_axes(axis);
  const GridDims& d = grid.dims();
  if (plane_index < 0 || plane_index >= d[a]) throw std::out_of_range("slice plane out of range");
  Mask m(d[u], d[v]);
  Index3 idx;
  idx[a] = plane_index;
  for (int r = 0; r < d[u]; ++r) {
    idx[u] = r;
    for (int c = 0; c < d[v]; ++c) {
      idx[v] = c;
      m(r, c) = grid.at(idx) ? 1 : 0;
    }
  }
  return m;
}

std::vector<CrossSection> extract_slices(const VoxelGrid& grid, Axis axis, int count) {
  std::vector<CrossSection> out;
  for (int plane : slice_planes(grid.dims()[axis_index(axis)], count)) {
    out.push_back({axis, plane, slice_mask(grid, axis, plane)});
  }
  return out;
}

ProjectionImage project(const VoxelGrid& grid, View view) {
  const auto [u, v] = perpendicular_axes(view_axis(view));
  const GridDims& d = grid.dims();
  ProjectionImage img{view, Mask(d[u], d[v])};
  for (int i = 0; i < d.nx; ++i) {
    for (int j = 0; j < d.ny; ++j) {
      for (int k = 0; k < d.nz; ++k) {
        if (!grid(i, j, k)) continue;
        const Index3 idx{i, j, k};
        img.pixels(idx[u], idx[v]) = 1;
      }
    }
  }
  return img;
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

void require_same_dims(const VoxelGrid& a, const VoxelGrid& b, const char* what) {
  if (!(a.dims() == b.dims())) throw std::invalid_argument(std::string(what) + ": dim mismatch");
}

}  // namespace

double volume_iou(const VoxelGrid& a, const VoxelGrid& b) {
  require_same_dims(a, b, "volume_iou");
  std::size_t inter = 0, uni = 0;
  const auto& ca = a.cells();
  const auto& cb = b.cells();
  for (std::size_t n = 0; n < ca.size(); ++n) {
    inter += (ca[n] & cb[n]);
    uni += (ca[n] | cb[n]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

VoxelGrid surface_shell(const VoxelGrid& grid) {
  VoxelGrid out = grid.empty_like();
  const GridDims& d = grid.dims();
  auto empty_at = [&](int i, int j, int k) { return !grid.in_bounds(i, j, k) || !grid(i, j, k); };
  for (int i = 0; i < d.nx; ++i) {
    for (int j = 0; j < d.ny; ++j) {
      for (int k = 0; k < d.nz; ++k) {
        if (!grid(i, j, k)) continue;
        if (empty_at(i - 1, j, k) || empty_at(i + 1, j, k) || empty_at(i, j - 1, k) ||
            empty_at(i, j + 1, k) || empty_at(i, j, k - 1) || empty_at(i, j, k + 1)) {
          out.set(i, j, k, true);
        }
      }
    }
  }
  return out;
}

VoxelGrid dilate26(const VoxelGrid& grid, int radius) {
  // The 3x3x3 box dilation separates into three 1D max filters.
  VoxelGrid cur = grid;
  const GridDims& d = grid.dims();
  const std::array<std::size_t, 3> stride{static_cast<std::size_t>(d.ny) * d.nz, static_cast<std::size_t>(d.nz), 1};
  std::vector<std::uint8_t> next(cur.cells().size());
  for (int step = 0; step < radius; ++step) {
    for (int axis = 0; axis < 3; ++axis) {
      const auto& src = cur.cells();
      const std::size_t s = stride[axis];
      const int n = d[axis];
      for (std::size_t f = 0; f < src.size(); ++f) {
        const int pos = static_cast<int>((f / s) % static_cast<std::size_t>(n));
        next[f] = src[f] | (pos > 0 ? src[f - s] : 0) | (pos + 1 < n ? src[f + s] : 0);
      }
      cur.cells().swap(next);
    }
  }
  return cur;
}

double surface_iou(const VoxelGrid& a, const VoxelGrid& b) {
  require_same_dims(a, b, "surface_iou");
  return volume_iou(dilate26(surface_shell(a)), dilate26(surface_shell(b)));
}

std::vector<Vec3> sample_surface(const TriMesh& mesh, int samples, std::uint64_t seed) {
  if (samples <= 0) throw std::invalid_argument("sample count must be positive");
  if (mesh.empty()) throw std::invalid_argument("cannot sample an empty mesh");
  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    total += triangle_area(mesh, mesh.triangles[t]);
    cumulative[t] = total;
  }
  if (!(total > 0.0)) throw std::invalid_argument("cannot sample a zero-area mesh");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    const double pick = unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const auto& tri = mesh.triangles[static_cast<std::size_t>(it - cumulative.begin())];
    const double r1 = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    out.push_back(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
  }
  return out;
}

namespace {

double l1(const Vec3& a, const Vec3& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z);
}

// Uniform bucket grid for exact L1 nearest-neighbor queries.
class PointIndex {
 public:
  explicit PointIndex(const std::vector<Vec3>& pts) : pts_(pts) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    lo_ = {inf, inf, inf};
    Vec3 hi{-inf, -inf, -inf};
    for (const auto& p : pts) {
      for (int a = 0; a < 3; ++a) {
        lo_[a] = std::min(lo_[a], p[a]);
        hi[a] = std::max(hi[a], p[a]);
      }
    }
    double extent = 0.0;
    for (int a = 0; a < 3; ++a) extent = std::max(extent, hi[a] - lo_[a]);
    // Surface samples fill few buckets of a dense grid; about two per axis per
    // cube root of the count keeps rings short for far queries.
    const int per_axis = std::clamp(static_cast<int>(2.0 * std::cbrt(static_cast<double>(pts.size()))), 1, 64);
    cell_ = extent > 0 ? extent / per_axis : 1.0;
    for (int a = 0; a < 3; ++a) n_[a] = std::max(1, static_cast<int>((hi[a] - lo_[a]) / cell_) + 1);
    buckets_.assign(static_cast<std::size_t>(n_[0]) * n_[1] * n_[2], {});
    for (std::size_t i = 0; i < pts.size(); ++i) buckets_[bucket_of(pts[i])].push_back(i);
  }

  double nearest(const Vec3& q) const {
    int c[3];
    for (int a = 0; a < 3; ++a) c[a] = std::clamp(static_cast<int>((q[a] - lo_[a]) / cell_), 0, n_[a] - 1);
    // Distance from q to the grid's box (q may lie outside it).
    double outside = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double lo = lo_[a], hi = lo_[a] + n_[a] * cell_;
      outside = std::max(outside, std::max(lo - q[a], q[a] - hi));
    }
    double best = std::numeric_limits<double>::infinity();
    const int max_ring = std::max({n_[0], n_[1], n_[2]});
    for (int ring = 0; ring <= max_ring; ++ring) {
      for (int i = c[0] - ring; i <= c[0] + ring; ++i) {
        if (i < 0 || i >= n_[0]) continue;
        for (int j = c[1] - ring; j <= c[1] + ring; ++j) {
          if (j < 0 || j >= n_[1]) continue;
          for (int k = c[2] - ring; k <= c[2] + ring; ++k) {
            if (k < 0 || k >= n_[2]) continue;
            if (std::max({std::abs(i - c[0]), std::abs(j - c[1]), std::abs(k - c[2])}) != ring) continue;
            for (auto idx : buckets_[(static_cast<std::size_t>(i) * n_[1] + j) * n_[2] + k]) {
              best = std::min(best, l1(q, pts_[idx]));
            }
          }
        }
      }
      // Unvisited points are at least `ring` whole cells away along some axis.
      if (best <= std::max(0.0, ring * cell_ - outside)) break;
    }
    return best;
  }

 private:
  std::size_t bucket_of(const Vec3& p) const {
    int c[3];
    for (int a = 0; a < 3; ++a) c[a] = std::clamp(static_cast<int>((p[a] - lo_[a]) / cell_), 0, n_[a] - 1);
    return (static_cast<std::size_t>(c[0]) * n_[1] + c[1]) * n_[2] + c[2];
  }

  const std::vector<Vec3>& pts_;
  Vec3 lo_;
  double cell_ = 1.0;
  int n_[3] = {1, 1, 1};
  std::vector<std::vector<std::size_t>> buckets_;
};

double mean_nearest(const std::vector<Vec3>& from, const PointIndex& to) {
  double sum = 0.0;
  for (const auto& p : from) sum += to.nearest(p);
  return sum / static_cast<double>(from.size());
}

}  // namespace

double chamfer_l1_points(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("chamfer: empty point set");
  const PointIndex ia(a), ib(b);
  return 0.5 * mean_nearest(a, ib) + 0.5 * mean_nearest(b, ia);
}

double chamfer_l1(const TriMesh& a, const TriMesh& b, int samples, std::uint64_t seed_a,
                  std::uint64_t seed_b) {
  if (samples <= 0) throw std::invalid_argument("chamfer: samples must be positive");
  return chamfer_l1_points(sample_surface(a, samples, seed_a), sample_surface(b, samples, seed_b));
}

// ---------------------------------------------------------------------------
// Components and clipping

std::vector<std::vector<Pixel>> connected_components(const Mask& mask) {
  std::vector<std::vector<Pixel>> comps;
  Image<std::uint8_t> seen(mask.rows(), mask.cols(), 0);
  std::deque<Pixel> queue;
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (!mask(r, c) || seen(r, c)) continue;
      std::vector<Pixel> members;
      seen(r, c) = 1;
      queue.push_back({r, c});
      while (!queue.empty()) {
        const Pixel p = queue.front();
        queue.pop_front();
        members.push_back(p);
        constexpr int dr[4] = {-1, 1, 0, 0};
        constexpr int dc[4] = {0, 0, -1, 1};
        for (int n = 0; n < 4; ++n) {
          const int rr = p.row + dr[n], cc = p.col + dc[n];
          if (mask.in_bounds(rr, cc) && mask(rr, cc) && !seen(rr, cc)) {
            seen(rr, cc) = 1;
            queue.push_back({rr, cc});
          }
        }
      }
      std::sort(members.begin(), members.end());
      comps.push_back(std::move(members));
    }
  }
  // Discovery order is already by smallest member, so a stable sort by size suffices.
  std::stable_sort(comps.begin(), comps.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return comps;
}

Image<int> label_components(const Mask& mask) {
  Image<int> labels(mask.rows(), mask.cols(), -1);
  const auto comps = connected_components(mask);
  for (std::size_t l = 0; l < comps.size(); ++l) {
    for (const auto& p : comps[l]) labels.at(p) = static_cast<int>(l);
  }
  return labels;
}

int count_components(const Mask& mask) {
  // Union-find over a row-major scan; cheaper than materializing members.
  const int n = static_cast<int>(mask.size());
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  int components = 0;
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (!mask(r, c)) continue;
      const int id = r * mask.cols() + c;
      parent[id] = id;
      ++components;
      if (c > 0 && mask(r, c - 1)) {
        const int a = find(id), b = find(id - 1);
        if (a != b) {
          parent[a] = b;
          --components;
        }
      }
      if (r > 0 && mask(r - 1, c)) {
        const int a = find(id), b = find(id - mask.cols());
        if (a != b) {
          parent[a] = b;
          --components;
        }
      }
    }
  }
  return components;
}

VoxelGrid clip(const VoxelGrid& grid, const Cuboid& box) {
  VoxelGrid out = grid.empty_like();
  const GridDims& d = grid.dims();
  const int i0 = std::max(0, box.min_corner.i), i1 = std::min(d.nx - 1, box.max_corner.i);
  const int j0 = std::max(0, box.min_corner.j), j1 = std::min(d.ny - 1, box.max_corner.j);
  const int k0 = std::max(0, box.min_corner.k), k1 = std::min(d.nz - 1, box.max_corner.k);
  for (int i = i0; i <= i1; ++i) {
    for (int j = j0; j <= j1; ++j) {
      for (int k = k0; k <= k1; ++k) {
        if (grid(i, j, k)) out.set(i, j, k, true);
      }
    }
  }
  return out;
}

VoxelGrid subtract(const VoxelGrid& a, const VoxelGrid& b) {
  if (!(a.dims() == b.dims())) throw std::invalid_argument("subtract: dim mismatch");
  VoxelGrid out = a;
  auto& cells = out.cells();
  const auto& cb = b.cells();
  for (std::size_t n = 0; n < cells.size(); ++n) cells[n] = cells[n] & static_cast<std::uint8_t>(!cb[n]);
  return out;
}

TriMesh boundary_mesh(const VoxelGrid& grid) {
  TriMesh mesh;
  const GridDims d = grid.dims();
  for (int i = 0; i < d.nx; ++i) {
    for (int j = 0; j < d.ny; ++j) {
      for (int k = 0; k < d.nz; ++k) {
        if (!grid(i, j, k)) continue;
        const Index3 cell{i, j, k};
        for (int a = 0; a < 3; ++a) {
          for (int dir : {-1, 1}) {
            Index3 nb = cell;
            nb[a] += dir;
            if (grid.in_bounds(nb.i, nb.j, nb.k) && grid.at(nb)) continue;
            const int b = (a + 1) % 3, c = (a + 2) % 3;
            Vec3 p0{static_cast<double>(i), static_cast<double>(j), static_cast<double>(k)};
            if (dir > 0) p0[a] += 1.0;
            Vec3 eb, ec;
            eb[b] = 1.0;
            ec[c] = 1.0;
            const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
            for (const Vec3& q : {p0, p0 + eb, p0 + eb + ec, p0 + ec}) {
              mesh.vertices.push_back(grid.index_to_world(q));
            }
            if (dir > 0) {
              mesh.triangles.push_back({base, base + 1, base + 2});
              mesh.triangles.push_back({base, base + 2, base + 3});
            } else {
              mesh.triangles.push_back({base, base + 2, base + 1});
              mesh.triangles.push_back({base, base + 3, base + 2});
            }
          }
        }
      }
    }
  }
  return mesh;
}

}  // namespace sliceparse

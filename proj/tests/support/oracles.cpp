#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace sliceparse::oracle {

VoxelGrid random_grid(std::mt19937_64& rng, int n, double density) {
  VoxelGrid g(GridDims{n, n, n});
  std::bernoulli_distribution on(density);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) g.set(i, j, k, on(rng));
  return g;
}

VoxelGrid random_blocks(std::mt19937_64& rng, int n, int boxes) {
  VoxelGrid g(GridDims{n, n, n});
  std::uniform_int_distribution<int> coord(0, n - 1);
  for (int b = 0; b < boxes; ++b) {
    int lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
      lo[a] = coord(rng);
      hi[a] = coord(rng);
      if (lo[a] > hi[a]) std::swap(lo[a], hi[a]);
    }
    for (int i = lo[0]; i <= hi[0]; ++i)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int k = lo[2]; k <= hi[2]; ++k) g.set(i, j, k, true);
  }
  return g;
}

Mask random_mask(std::mt19937_64& rng, int rows, int cols, double density) {
  Mask m(rows, cols);
  std::bernoulli_distribution on(density);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = on(rng) ? 1 : 0;
  return m;
}

double volume_iou(const VoxelGrid& a, const VoxelGrid& b) {
  long long inter = 0, uni = 0;
  const GridDims d = a.dims();
  for (int i = 0; i < d.nx; ++i)
    for (int j = 0; j < d.ny; ++j)
      for (int k = 0; k < d.nz; ++k) {
        const bool x = a(i, j, k), y = b(i, j, k);
        inter += (x && y);
        uni += (x || y);
      }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

VoxelGrid surface_shell(const VoxelGrid& g) {
  VoxelGrid out = g.empty_like();
  const GridDims d = g.dims();
  const int off[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (int i = 0; i < d.nx; ++i)
    for (int j = 0; j < d.ny; ++j)
      for (int k = 0; k < d.nz; ++k) {
        if (!g(i, j, k)) continue;
        for (const auto& o : off) {
          const int a = i + o[0], b = j + o[1], c = k + o[2];
          if (!g.in_bounds(a, b, c) || !g(a, b, c)) {
            out.set(i, j, k, true);
            break;
          }
        }
      }
  return out;
}

VoxelGrid dilate_once(const VoxelGrid& g) {
  VoxelGrid out = g.empty_like();
  const GridDims d = g.dims();
  for (int i = 0; i < d.nx; ++i)
    for (int j = 0; j < d.ny; ++j)
      for (int k = 0; k < d.nz; ++k) {
        bool hit = false;
        for (int a = -1; a <= 1 && !hit; ++a)
          for (int b = -1; b <= 1 && !hit; ++b)
            for (int c = -1; c <= 1 && !hit; ++c)
              hit = g.in_bounds(i + a, j + b, k + c) && g(i + a, j + b, k + c);
        out.set(i, j, k, hit);
      }
  return out;
}

double surface_iou(const VoxelGrid& a, const VoxelGrid& b) {
  return volume_iou(dilate_once(surface_shell(a)), dilate_once(surface_shell(b)));
}

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::set<std::set<std::pair<int, int>>> components(const Mask& m) {
  DisjointSets sets(static_cast<int>(m.size()));
  auto id = [&](int r, int c) { return r * m.cols() + c; };
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      if (!m(r, c)) continue;
      if (r + 1 < m.rows() && m(r + 1, c)) sets.unite(id(r, c), id(r + 1, c));
      if (c + 1 < m.cols() && m(r, c + 1)) sets.unite(id(r, c), id(r, c + 1));
    }
  std::map<int, std::set<std::pair<int, int>>> by_root;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (m(r, c)) by_root[sets.find(id(r, c))].insert({r, c});
  std::set<std::set<std::pair<int, int>>> out;
  for (auto& [root, members] : by_root) out.insert(std::move(members));
  return out;
}

namespace {

double mean_nearest(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  double sum = 0.0;
  for (const Vec3& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : to) {
      best = std::min(best, std::abs(p.x - q.x) + std::abs(p.y - q.y) + std::abs(p.z - q.z));
    }
    sum += best;
  }
  return sum / static_cast<double>(from.size());
}

}  // namespace

double chamfer_l1(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  return 0.5 * mean_nearest(a, b) + 0.5 * mean_nearest(b, a);
}

}  // namespace sliceparse::oracle

#include "sliceparse/surfacer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sliceparse/geomcore.hpp"

namespace sliceparse {

double signed_area(std::span<const Point2> ring) {
  double s = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Point2& p = ring[i];
    const Point2& q = ring[(i + 1) % ring.size()];
    s += p.x * q.y - q.x * p.y;
  }
  return 0.5 * s;
}

Contour make_contour(std::vector<Point2> points, int plane_index) {
  if (points.size() < 3) throw std::invalid_argument("contour needs at least 3 points");
  Contour c;
  c.plane_index = plane_index;
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point2& p = points[i];
    const Point2& q = points[(i + 1) % points.size()];
    const double w = p.x * q.y - q.x * p.y;
    a2 += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  c.area = 0.5 * a2;
  if (a2 != 0.0) {
    c.centroid = {cx / (3.0 * a2), cy / (3.0 * a2)};
  } else {
    for (const auto& p : points) {
      c.centroid.x += p.x / static_cast<double>(points.size());
      c.centroid.y += p.y / static_cast<double>(points.size());
    }
  }
  c.points = std::move(points);
  return c;
}

// ---------------------------------------------------------------------------
// Contour tracing

namespace {

// Directions in (row, col) = (x, y) plane coordinates.
enum Dir { kPlusX = 0, kPlusY = 1, kMinusX = 2, kMinusY = 3 };
constexpr int kStepX[4] = {1, 0, -1, 0};
constexpr int kStepY[4] = {0, 1, 0, -1};

Dir turn_right(Dir d) { return static_cast<Dir>((d + 3) % 4); }
Dir turn_left(Dir d) { return static_cast<Dir>((d + 1) % 4); }

// Pixels on the left and right of the unit edge leaving vertex (x, y) along d.
void edge_sides(int x, int y, Dir d, Pixel& left, Pixel& right) {
  switch (d) {
    case kPlusX: left = {x, y}; right = {x, y - 1}; break;
    case kPlusY: left = {x - 1, y}; right = {x, y}; break;
    case kMinusX: left = {x - 1, y - 1}; right = {x - 1, y}; break;
    case kMinusY: left = {x, y - 1}; right = {x - 1, y - 1}; break;
  }
}

std::vector<Point2> trace_outer(const Image<int>& labels, int label, Pixel start) {
  auto inside = [&](Pixel p) { return labels.in_bounds(p.row, p.col) && labels.at(p) == label; };
  auto is_boundary = [&](int x, int y, Dir d) {
    Pixel l, r;
    edge_sides(x, y, d, l, r);
    return inside(l) && !inside(r);
  };

  // Left side of the topmost-leftmost pixel, walked with the pixel on the left.
  const int x0 = start.row, y0 = start.col + 1;
  const Dir d0 = kMinusY;
  int x = x0, y = y0;
  Dir d = d0;
  std::vector<Point2> corners;
  const std::size_t guard = 4 * labels.size() + 8;
  for (std::size_t step = 0; step < guard; ++step) {
    x += kStepX[d];
    y += kStepY[d];
    Dir next;
    if (is_boundary(x, y, turn_right(d))) {
      next = turn_right(d);
    } else if (is_boundary(x, y, d)) {
      next = d;
    } else {
      next = turn_left(d);
    }
    if (next != d) corners.push_back({static_cast<double>(x), static_cast<double>(y)});
    d = next;
    if (x == x0 && y == y0 && d == d0) return corners;
  }
  throw std::logic_error("contour tracing did not close");
}

}  // namespace

std::vector<Contour> extract_contours(const Mask& mask, int plane_index) {
  std::vector<Contour> out;
  const auto comps = connected_components(mask);
  if (comps.empty()) return out;
  Image<int> labels(mask.rows(), mask.cols(), -1);
  for (std::size_t l = 0; l < comps.size(); ++l) {
    for (const auto& p : comps[l]) labels.at(p) = static_cast<int>(l);
  }
  for (std::size_t l = 0; l < comps.size(); ++l) {
    auto ring = trace_outer(labels, static_cast<int>(l), comps[l].front());
    // The walk starts mid-edge, so the first corner found is generally not
    // the start vertex; rotate so the ring begins at its smallest point.
    auto first = std::min_element(ring.begin(), ring.end(), [](const Point2& a, const Point2& b) {
      return std::pair(a.x, a.y) < std::pair(b.x, b.y);
    });
    std::rotate(ring.begin(), first, ring.end());
    out.push_back(make_contour(std::move(ring), plane_index));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Correspondence

double correspondence_cost(const Contour& a, const Contour& b, const CorrespondParams& params) {
  const double dx = a.centroid.x - b.centroid.x;
  const double dy = a.centroid.y - b.centroid.y;
  const double larger = std::max(a.area, b.area);
  const double size_term = larger > 0.0 ? std::abs(a.area - b.area) / larger : 0.0;
  return std::sqrt(dx * dx + dy * dy) + params.size_weight_factor * params.diagonal * size_term;
}

Correspondence correspond(std::span<const Contour> a, std::span<const Contour> b,
                          const CorrespondParams& params) {
  struct Candidate {
    double cost;
    int ia, ib;
  };
  std::vector<Candidate> cands;
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    for (int j = 0; j < static_cast<int>(b.size()); ++j) {
      cands.push_back({correspondence_cost(a[i], b[j], params), i, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& p, const Candidate& q) {
    if (p.cost != q.cost) return p.cost < q.cost;
    if (p.ia != q.ia) return p.ia < q.ia;
    return p.ib < q.ib;
  });
  const double cutoff = params.cutoff_factor * params.diagonal;
  std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
  Correspondence out;
  for (const auto& c : cands) {
    if (c.cost > cutoff) break;
    if (used_a[c.ia] || used_b[c.ib]) continue;
    used_a[c.ia] = used_b[c.ib] = true;
    out.pairs.push_back({c.ia, c.ib, c.cost});
  }
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    if (!used_a[i]) out.unmatched_a.push_back(i);
  }
  for (int j = 0; j < static_cast<int>(b.size()); ++j) {
    if (!used_b[j]) out.unmatched_b.push_back(j);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rings

std::vector<Point2> resample_ring(std::span<const Point2> ring, std::size_t count) {
  const std::size_t n = ring.size();
  if (n < 3) throw std::invalid_argument("resample_ring: ring needs at least 3 points");
  if (count < n) throw std::invalid_argument("resample_ring: cannot drop vertices");
  std::vector<Point2> out(ring.begin(), ring.end());
  if (count == n) return out;

  std::vector<double> len(n);
  double total = 0.0;
  for (std::size_t e = 0; e < n; ++e) {
    const Point2& p = ring[e];
    const Point2& q = ring[(e + 1) % n];
    len[e] = std::hypot(q.x - p.x, q.y - p.y);
    total += len[e];
  }
  const std::size_t extra = count - n;
  // Largest-remainder apportionment of the extra points.
  std::vector<std::size_t> per_edge(n, 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t e = 0; e < n; ++e) {
    const double share = total > 0.0 ? extra * len[e] / total : static_cast<double>(extra) / n;
    per_edge[e] = static_cast<std::size_t>(std::floor(share));
    assigned += per_edge[e];
    remainders.push_back({share - std::floor(share), e});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& p, const auto& q) { return p.first > q.first; });
  for (std::size_t r = 0; assigned < extra; ++r, ++assigned) ++per_edge[remainders[r % n].second];

  out.clear();
  out.reserve(count);
  for (std::size_t e = 0; e < n; ++e) {
    const Point2& p = ring[e];
    const Point2& q = ring[(e + 1) % n];
    out.push_back(p);
    const std::size_t m = per_edge[e];
    for (std::size_t s = 1; s <= m; ++s) {
      const double t = static_cast<double>(s) / static_cast<double>(m + 1);
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  return out;
}

std::size_t best_rotation(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.size() != b.size()) throw std::invalid_argument("best_rotation: ring sizes differ");
  const std::size_t n = a.size();
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n; ++s) {
    double cost = 0.0;
    for (std::size_t i = 0; i < n && cost < best_cost; ++i) {
      const Point2& q = b[(i + s) % n];
      cost += (a[i].x - q.x) * (a[i].x - q.x) + (a[i].y - q.y) * (a[i].y - q.y);
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = s;
    }
  }
  return best;
}

namespace {

double orient(const Point2& a, const Point2& b, const Point2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool in_closed_triangle(const Point2& p, const Point2& a, const Point2& b, const Point2& c) {
  return orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0;
}

}  // namespace

std::vector<Triangle> triangulate_polygon(std::span<const Point2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) throw std::invalid_argument("cannot triangulate fewer than 3 points");
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  std::vector<Triangle> tris;
  tris.reserve(n - 2);
  constexpr double kEps = 1e-12;

  std::size_t cursor = 0;
  while (idx.size() > 3) {
    const std::size_t m = idx.size();
    bool clipped = false;
    for (std::size_t step = 0; step < m && !clipped; ++step) {
      const std::size_t t = (cursor + step) % m;
      const auto i0 = idx[(t + m - 1) % m], i1 = idx[t], i2 = idx[(t + 1) % m];
      const Point2 &a = polygon[i0], &b = polygon[i1], &c = polygon[i2];
      if (orient(a, b, c) <= kEps) continue;
      bool blocked = false;
      for (auto other : idx) {
        if (other == i0 || other == i1 || other == i2) continue;
        const Point2& p = polygon[other];
        if ((p == a) || (p == c)) continue;
        if (in_closed_triangle(p, a, b, c)) {
          blocked = true;
          break;
        }
      }
      if (blocked) continue;
      tris.push_back({i0, i1, i2});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(t));
      cursor = t == 0 ? 0 : t - 1;
      clipped = true;
    }
    if (!clipped) {
      // Numerically stuck: clip the most convex vertex.
      std::size_t best = 0;
      double best_o = -std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < m; ++t) {
        const double o = orient(polygon[idx[(t + m - 1) % m]], polygon[idx[t]], polygon[idx[(t + 1) % m]]);
        if (o > best_o) {
          best_o = o;
          best = t;
        }
      }
      tris.push_back({idx[(best + m - 1) % m], idx[best], idx[(best + 1) % m]});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(best));
      cursor = 0;
    }
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

// ---------------------------------------------------------------------------
// Lofting and caps

namespace {

void add_ring(TriMesh& mesh, std::span<const Point2> ring, double z) {
  for (const auto& p : ring) mesh.vertices.push_back({p.x, p.y, z});
}

// Strip between ring levels starting at vertex offsets `lo` and `hi` (lo below hi).
void add_strip(TriMesh& mesh, std::uint32_t lo, std::uint32_t hi, std::uint32_t n) {
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t i1 = (i + 1) % n;
    mesh.triangles.push_back({lo + i, lo + i1, hi + i1});
    mesh.triangles.push_back({lo + i, hi + i1, hi + i});
  }
}

void add_cap(TriMesh& mesh, std::span<const Point2> ring, std::uint32_t offset, bool facing_up) {
  for (auto t : triangulate_polygon(ring)) {
    if (facing_up) {
      mesh.triangles.push_back({offset + t[0], offset + t[1], offset + t[2]});
    } else {
      mesh.triangles.push_back({offset + t[0], offset + t[2], offset + t[1]});
    }
  }
}

std::vector<Point2> rotated(std::vector<Point2> ring, std::size_t shift) {
  std::rotate(ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(shift), ring.end());
  return ring;
}

}  // namespace

TriMesh loft(const Contour& a, const Contour& b, double z_a, double z_b) {
  if (z_a == z_b) throw std::invalid_argument("loft: zero gap between planes");
  const std::size_t n = std::max(a.points.size(), b.points.size());
  auto ra = resample_ring(a.points, n);
  auto rb = resample_ring(b.points, n);
  rb = rotated(std::move(rb), best_rotation(ra, rb));
  TriMesh mesh;
  const bool a_low = z_a < z_b;
  add_ring(mesh, a_low ? ra : rb, a_low ? z_a : z_b);
  add_ring(mesh, a_low ? rb : ra, a_low ? z_b : z_a);
  add_strip(mesh, 0, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n));
  return mesh;
}

TriMesh cap(const Contour& contour, double z) {
  if (contour.points.size() < 3) throw std::invalid_argument("cap: degenerate contour");
  TriMesh mesh;
  add_ring(mesh, contour.points, z);
  add_cap(mesh, contour.points, 0, true);
  return mesh;
}

// ---------------------------------------------------------------------------
// Parts

PartSlices make_part_slices(const VoxelGrid& part, Axis axis, std::span<const int> planes,
                            const Cuboid& box) {
  PartSlices out;
  out.axis = axis;
  out.box = box;
  const int a = axis_index(axis);
  const auto [u, v] = perpendicular_axes(axis);
  const double rows = part.dims()[u], cols = part.dims()[v];
  out.diagonal = std::sqrt(rows * rows + cols * cols);
  std::vector<int> sorted(planes.begin(), planes.end());
  std::sort(sorted.begin(), sorted.end());
  for (int p : sorted) {
    if (p < box.min_corner[a] || p > box.max_corner[a]) continue;
    out.planes.push_back({p, extract_contours(slice_mask(part, axis, p), p)});
  }
  return out;
}

TriMesh reconstruct_part(const PartSlices& slices, const VoxelGrid& frame) {
  const auto& planes = slices.planes;
  const std::size_t np = planes.size();
  const int a = axis_index(slices.axis);
  const CorrespondParams params{slices.diagonal};

  // up[p][c]: index of the contour on plane p+1 matched to contour c of plane p.
  std::vector<std::vector<int>> up(np), down(np);
  for (std::size_t p = 0; p < np; ++p) {
    up[p].assign(planes[p].contours.size(), -1);
    down[p].assign(planes[p].contours.size(), -1);
  }
  for (std::size_t p = 0; p + 1 < np; ++p) {
    const auto corr = correspond(planes[p].contours, planes[p + 1].contours, params);
    for (const auto& m : corr.pairs) {
      up[p][m.a] = m.b;
      down[p + 1][m.b] = m.a;
    }
  }

  auto midpoint = [](int lower_plane, int upper_plane) {
    // An integer cell boundary strictly between the two plane centers.
    return static_cast<double>((lower_plane + upper_plane + 1) / 2);
  };

  TriMesh local;
  for (std::size_t p0 = 0; p0 < np; ++p0) {
    for (std::size_t c0 = 0; c0 < planes[p0].contours.size(); ++c0) {
      if (down[p0][c0] != -1) continue;
      // Walk the chain upward.
      std::vector<const Contour*> chain;
      std::size_t p = p0;
      int c = static_cast<int>(c0);
      while (true) {
        chain.push_back(&planes[p].contours[static_cast<std::size_t>(c)]);
        const int next = up[p][static_cast<std::size_t>(c)];
        if (next < 0) break;
        c = next;
        ++p;
      }
      const std::size_t p_last = p;

      std::size_t n = 0;
      for (const auto* ct : chain) n = std::max(n, ct->points.size());
      std::vector<std::vector<Point2>> rings;
      for (const auto* ct : chain) {
        auto ring = resample_ring(ct->points, n);
        if (!rings.empty()) ring = rotated(std::move(ring), best_rotation(rings.back(), ring));
        rings.push_back(std::move(ring));
      }

      const double z_lo = p0 == 0 ? static_cast<double>(slices.box.min_corner[a])
                                  : midpoint(planes[p0 - 1].plane_index, planes[p0].plane_index);
      const double z_hi = p_last + 1 == np
                              ? static_cast<double>(slices.box.max_corner[a] + 1)
                              : midpoint(planes[p_last].plane_index, planes[p_last + 1].plane_index);

      const auto n32 = static_cast<std::uint32_t>(n);
      const auto base = static_cast<std::uint32_t>(local.vertices.size());
      add_ring(local, rings.front(), z_lo);
      for (std::size_t t = 0; t < rings.size(); ++t) {
        add_ring(local, rings[t], chain[t]->plane_index + 0.5);
      }
      add_ring(local, rings.back(), z_hi);
      const auto levels = static_cast<std::uint32_t>(rings.size() + 2);
      for (std::uint32_t l = 0; l + 1 < levels; ++l) add_strip(local, base + l * n32, base + (l + 1) * n32, n32);
      add_cap(local, rings.front(), base, false);
      add_cap(local, rings.back(), base + (levels - 1) * n32, true);
    }
  }

  // Plane coordinates (row, col, height) -> world.
  const auto [u, v] = perpendicular_axes(slices.axis);
  TriMesh world;
  world.triangles = std::move(local.triangles);
  world.vertices.reserve(local.vertices.size());
  for (const auto& q : local.vertices) {
    Vec3 idx;
    idx[u] = q.x;
    idx[v] = q.y;
    idx[a] = q.z;
    world.vertices.push_back(frame.index_to_world(idx));
  }
  // (u, v, axis) is a left-handed permutation for the Y axis.
  if (slices.axis == Axis::Y) flip_winding(world);
  return world;
}

}  // namespace sliceparse

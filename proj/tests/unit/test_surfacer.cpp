#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sliceparse/geomcore.hpp"
#include "sliceparse/shapes.hpp"
#include "sliceparse/surfacer.hpp"

using namespace sliceparse;

namespace {

Mask disk(int size, double cr, double cc, double radius) {
  Mask m(size, size);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      const double dr = r + 0.5 - cr, dc = c + 0.5 - cc;
      m(r, c) = dr * dr + dc * dc <= radius * radius;
    }
  return m;
}

Contour square(double x0, double y0, double side, int plane) {
  return make_contour({{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}}, plane);
}

bool closed(const TriMesh& m) { return is_edge_manifold(m) && has_consistent_winding(m) && signed_volume(m) > 0; }

}  // namespace

TEST(Contours, FilledRectangle) {
  Mask m(10, 12);
  for (int r = 2; r < 7; ++r)
    for (int c = 3; c < 10; ++c) m(r, c) = 1;
  const auto contours = extract_contours(m, 4);
  ASSERT_EQ(contours.size(), 1u);
  EXPECT_EQ(contours[0].points.size(), 4u);
  EXPECT_EQ(contours[0].plane_index, 4);
  EXPECT_DOUBLE_EQ(contours[0].area, 35.0);
  EXPECT_DOUBLE_EQ(contours[0].centroid.x, 4.5);
  EXPECT_DOUBLE_EQ(contours[0].centroid.y, 6.5);
  EXPECT_GT(signed_area(contours[0].points), 0.0);
}

TEST(Contours, EmptyAndTwoBlobs) {
  EXPECT_TRUE(extract_contours(Mask(6, 6), 0).empty());
  Mask m(12, 12);
  m(1, 1) = m(1, 2) = 1;
  for (int r = 6; r < 10; ++r)
    for (int c = 6; c < 10; ++c) m(r, c) = 1;
  const auto contours = extract_contours(m, 0);
  ASSERT_EQ(contours.size(), 2u);
  EXPECT_DOUBLE_EQ(contours[0].area, 16.0);
  EXPECT_DOUBLE_EQ(contours[1].area, 2.0);
}

TEST(Contours, AreaEqualsPixelCountWithoutHoles) {
  const Mask m = disk(32, 16, 15, 9.3);
  const auto contours = extract_contours(m, 0);
  ASSERT_EQ(contours.size(), 1u);
  EXPECT_DOUBLE_EQ(contours[0].area, static_cast<double>(count_true(m)));
}

TEST(Correspond, IdenticalSets) {
  const std::vector<Contour> a{square(0, 0, 4, 0), square(10, 10, 3, 0)};
  const CorrespondParams p{20.0};
  const Correspondence c = correspond(a, a, p);
  ASSERT_EQ(c.pairs.size(), 2u);
  for (const auto& m : c.pairs) {
    EXPECT_EQ(m.a, m.b);
    EXPECT_EQ(m.cost, 0.0);
  }
  EXPECT_TRUE(c.unmatched_a.empty());
}

TEST(Correspond, OneAgainstNone) {
  const std::vector<Contour> a{square(0, 0, 4, 0)};
  const Correspondence c = correspond(a, std::vector<Contour>{}, CorrespondParams{20.0});
  EXPECT_TRUE(c.pairs.empty());
  EXPECT_EQ(c.unmatched_a, std::vector<int>{0});
}

TEST(Correspond, TranslatedCirclesMatchExhaustiveAssignment) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(8, 56), radius(2, 5), shift(-1.5, 1.5);
  const CorrespondParams p{64.0 * std::sqrt(2.0)};
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 4;
    std::vector<Contour> a, b;
    for (int i = 0; i < n; ++i) {
      const double r = pos(rng), c = pos(rng), rad = radius(rng);
      auto ca = extract_contours(disk(64, r, c, rad), 0);
      auto cb = extract_contours(disk(64, r + shift(rng), c + shift(rng), rad), 1);
      a.push_back(ca[0]);
      b.push_back(cb[0]);
    }
    std::vector<int> perm(n), best;
    std::iota(perm.begin(), perm.end(), 0);
    double best_cost = 1e18;
    do {
      double total = 0.0;
      for (int i = 0; i < n; ++i) total += correspondence_cost(a[i], b[perm[i]], p);
      if (total < best_cost) best_cost = total, best = perm;
    } while (std::next_permutation(perm.begin(), perm.end()));

    const Correspondence c = correspond(a, b, p);
    ASSERT_EQ(static_cast<int>(c.pairs.size()), n);
    for (const auto& m : c.pairs) EXPECT_EQ(m.b, best[m.a]) << "trial " << trial;
  }
}

TEST(Resample, KeepsVerticesAndCount) {
  const Contour s = square(0, 0, 4, 0);
  const auto ring = resample_ring(s.points, 10);
  ASSERT_EQ(ring.size(), 10u);
  for (const Point2& v : s.points) EXPECT_NE(std::find(ring.begin(), ring.end(), v), ring.end());
  EXPECT_NEAR(signed_area(ring), 16.0, 1e-12);
}

TEST(BestRotation, FindsShift) {
  const auto ring = resample_ring(square(0, 0, 4, 0).points, 8);
  std::vector<Point2> rotated(ring.size());
  for (std::size_t i = 0; i < ring.size(); ++i) rotated[i] = ring[(i + 3) % ring.size()];
  EXPECT_EQ(best_rotation(rotated, ring), 3u);
}

TEST(Triangulate, ConvexFan) {
  const auto tris = triangulate_polygon(resample_ring(square(0, 0, 2, 0).points, 4));
  EXPECT_EQ(tris.size(), 2u);
}

TEST(Triangulate, LPolygonArea) {
  const std::vector<Point2> l{{0, 0}, {6, 0}, {6, 2}, {2, 2}, {2, 5}, {0, 5}};
  const auto tris = triangulate_polygon(l);
  ASSERT_EQ(tris.size(), 4u);
  double area = 0.0;
  for (const auto& t : tris) {
    const Point2 a = l[t[0]], b = l[t[1]], c = l[t[2]];
    const double twice = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    EXPECT_GT(twice, 0.0);
    area += twice / 2;
  }
  EXPECT_NEAR(area, 18.0, 1e-6);
  EXPECT_THROW(triangulate_polygon(std::vector<Point2>{{0, 0}, {1, 0}}), std::invalid_argument);
}

TEST(Loft, SquaresGivePrismSides) {
  const TriMesh m = loft(square(0, 0, 2, 0), square(0, 0, 2, 1), 0.0, 3.0);
  EXPECT_EQ(m.triangles.size(), 8u);
  TriMesh closed_prism = m;
  closed_prism.append(cap(square(0, 0, 2, 1), 3.0));
  TriMesh bottom = cap(square(0, 0, 2, 0), 0.0);
  flip_winding(bottom);
  closed_prism.append(bottom);
  closed_prism = weld_exact(closed_prism);
  EXPECT_TRUE(is_edge_manifold(closed_prism));
  EXPECT_NEAR(std::abs(signed_volume(closed_prism)), 12.0, 1e-9);
}

TEST(Loft, SquareToCircleIsWatertightBetweenRings) {
  const Contour circle = extract_contours(disk(32, 16, 16, 8), 1)[0];
  const Contour sq = square(10, 10, 12, 0);
  TriMesh m = loft(sq, circle, 0.0, 2.0);
  // The square ring is resampled up to the circle's vertex count.
  const Contour dense = make_contour(resample_ring(sq.points, circle.points.size()), 0);
  TriMesh top = cap(circle, 2.0), bottom = cap(dense, 0.0);
  flip_winding(bottom);
  m.append(top);
  m.append(bottom);
  EXPECT_TRUE(is_edge_manifold(weld_exact(m)));
}

TEST(Loft, ZeroGapIsError) {
  EXPECT_THROW(loft(square(0, 0, 2, 0), square(0, 0, 2, 1), 1.0, 1.0), std::invalid_argument);
}

TEST(ReconstructPart, EmptySlicesGiveEmptyMesh) {
  const VoxelGrid g(GridDims{8, 8, 8});
  const PartSlices s = make_part_slices(g, Axis::Z, std::vector<int>{1, 3, 5}, g.full_extent());
  EXPECT_TRUE(reconstruct_part(s, g).empty());
}

TEST(ReconstructPart, SingleSliceIsDoubleCappedSlab) {
  VoxelGrid g(GridDims{16, 16, 16});
  for (int i = 4; i < 10; ++i)
    for (int j = 3; j < 12; ++j)
      for (int k = 5; k < 9; ++k) g.set(i, j, k, true);
  const PartSlices s = make_part_slices(g, Axis::Z, std::vector<int>{7}, *g.bounding_box());
  const TriMesh m = reconstruct_part(s, g);
  EXPECT_TRUE(closed(m));
  // Caps at the box faces z = 5 and z = 9.
  EXPECT_NEAR(signed_volume(m), 6.0 * 9.0 * 4.0, 1e-9);
}

TEST(ReconstructPart, ClosedOnExperimentShapes) {
  for (const auto& shape : experiment_set(32)) {
    for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
      const PartSlices s = make_part_slices(shape.grid, axis, slice_planes(32, 12), *shape.grid.bounding_box());
      const TriMesh m = reconstruct_part(s, shape.grid);
      EXPECT_TRUE(closed(m)) << shape.name << " axis " << to_string(axis);
    }
  }
}

TEST(ReconstructPart, CylinderVolume) {
  const VoxelGrid g = make_shape("cylinder", 32).grid;
  const PartSlices s = make_part_slices(g, Axis::Z, slice_planes(32, 12), *g.bounding_box());
  const TriMesh m = reconstruct_part(s, g);
  EXPECT_TRUE(closed(m));
  EXPECT_NEAR(signed_volume(m) / static_cast<double>(g.count()), 1.0, 0.10);
  EXPECT_GE(oracle::surface_iou(voxelize_into(m, g), g), 0.90);
}

TEST(ReconstructPart, WorldFrame) {
  // Voxel size 0.5 and a shifted origin scale and move the output.
  VoxelGrid g(GridDims{8, 8, 8}, 0.5, {10, 20, 30});
  for (int i = 2; i < 6; ++i)
    for (int j = 2; j < 6; ++j)
      for (int k = 1; k < 7; ++k) g.set(i, j, k, true);
  const TriMesh m = reconstruct_part(make_part_slices(g, Axis::Z, slice_planes(8, 4), *g.bounding_box()), g);
  const Bounds3 b = bounds(m);
  EXPECT_NEAR(b.min.x, 11.0, 1e-12);
  EXPECT_NEAR(b.max.y, 23.0, 1e-12);
  EXPECT_NEAR(b.min.z, 30.5, 1e-12);
  EXPECT_NEAR(b.max.z, 33.5, 1e-12);
}

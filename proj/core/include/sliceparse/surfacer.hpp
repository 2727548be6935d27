#pragma once

#include <span>
#include <vector>

#include "sliceparse/mesh.hpp"
#include "sliceparse/types.hpp"
#include "sliceparse/voxel_grid.hpp"

namespace sliceparse {

/// Closed CCW polygon in slice pixel-corner coordinates: x runs along image
/// rows, y along columns, and pixel (r, c) covers [r, r+1] x [c, c+1].
struct Contour {
  std::vector<Point2> points;
  int plane_index = 0;
  Point2 centroid;
  double area = 0.0;
};

/// Fills centroid and area from the points.
Contour make_contour(std::vector<Point2> points, int plane_index);
double signed_area(std::span<const Point2> ring);

/// Outer boundary of each 4-connected component, traced along pixel edges
/// (diagonal pinches inside a component are bridged), collinear vertices
/// removed. Holes are ignored. Order follows connected_components.
std::vector<Contour> extract_contours(const Mask& mask, int plane_index);

struct ContourMatch {
  int a = 0;
  int b = 0;
  double cost = 0.0;
};

struct Correspondence {
  std::vector<ContourMatch> pairs;
  std::vector<int> unmatched_a;
  std::vector<int> unmatched_b;
};

struct CorrespondParams {
  /// Slice diagonal in pixels; scales both the size term and the cutoff.
  double diagonal = 1.0;
  double size_weight_factor = 0.25;
  double cutoff_factor = 0.5;
};

/// ‖centroid_a − centroid_b‖ + w·|area_a − area_b| / max(area_a, area_b),
/// w = size_weight_factor · diagonal.
double correspondence_cost(const Contour& a, const Contour& b, const CorrespondParams& params);

/// Greedy one-to-one matching by increasing cost; pairs costing more than
/// cutoff_factor · diagonal stay unmatched.
Correspondence correspond(std::span<const Contour> a, std::span<const Contour> b,
                          const CorrespondParams& params);

/// Ring with `count` points: the original vertices kept, extra points spread
/// over the edges in proportion to their length.
std::vector<Point2> resample_ring(std::span<const Point2> ring, std::size_t count);

/// Rotation s minimizing Σ‖a_i − b_{(i+s) mod n}‖²; rings must have equal size.
std::size_t best_rotation(std::span<const Point2> a, std::span<const Point2> b);

/// Ear clipping of a simple CCW polygon; returns index triples into `polygon`.
std::vector<Triangle> triangulate_polygon(std::span<const Point2> polygon);

/// Closed triangle strip joining two contours at heights z_a and z_b, in plane
/// coordinates (x, y, height). Both rings are resampled to the larger count.
TriMesh loft(const Contour& a, const Contour& b, double z_a, double z_b);

/// Triangulated polygon at height z, in plane coordinates, facing +height.
TriMesh cap(const Contour& contour, double z);

struct PlaneContours {
  int plane_index = 0;
  std::vector<Contour> contours;
};

/// The slices of one part: every slice plane inside the part's box along
/// `axis` (empty planes included), in increasing order.
struct PartSlices {
  Axis axis = Axis::Z;
  Cuboid box;
  std::vector<PlaneContours> planes;
  double diagonal = 1.0;
};

/// Contours of `part` on each of `planes` falling inside `box`.
PartSlices make_part_slices(const VoxelGrid& part, Axis axis, std::span<const int> planes,
                            const Cuboid& box);

/// Lofts matched contours of consecutive planes into tubes and caps every tube
/// end: halfway to the neighboring plane for unmatched ends, at the box face
/// when no further plane lies inside the box. Output is in the world frame of
/// `frame`, closed and outward-wound. No contours yields an empty mesh.
TriMesh reconstruct_part(const PartSlices& slices, const VoxelGrid& frame);

}  // namespace sliceparse

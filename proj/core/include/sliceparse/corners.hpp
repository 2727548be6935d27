#pragma once

#include <optional>
#include <vector>

#include "sliceparse/geomcore.hpp"
#include "sliceparse/types.hpp"

namespace sliceparse {

struct HarrisParams {
  double k = 0.05;
  /// Half-width of the uniform box window w(x, y). Wider windows move the
  /// response peak inside convex corners (by about 1.5 px at radius 2).
  int window_radius = 1;
  /// Response threshold. With `relative_threshold` it is a fraction of the
  /// image's maximum response, otherwise an absolute value.
  double threshold = 0.01;
  bool relative_threshold = true;
  int nms_radius = 3;
  int max_corners = 32;
  /// One 3x3 box blur of the binary silhouette before differentiation.
  /// Off by default: it shifts peaks the same way a wider window does.
  bool smooth = false;
};

/// Throws std::invalid_argument for out-of-range fields; logs a warning when k
/// lies outside [0.01, 0.25].
void check(const HarrisParams& params);

struct Corner {
  int row = 0;
  int col = 0;
  double response = 0.0;

  Pixel pixel() const { return {row, col}; }
};

struct CornerSet {
  View view = View::Top;
  /// Sorted by response, descending.
  std::vector<Corner> points;
};

RealImage box_blur3(const RealImage& img);

/// Harris response det(M) − k·trace(M)² with M summed over the box window.
/// Gradients are central differences with replicated borders.
RealImage harris_response(const Mask& img, const HarrisParams& params);
inline RealImage harris_response(const ProjectionImage& img, const HarrisParams& params) {
  return harris_response(img.pixels, params);
}

/// Local maxima above threshold, greedily suppressed so that accepted corners
/// are more than nms_radius apart (Chebyshev), then truncated to max_corners.
CornerSet detect_corners(const ProjectionImage& img, const HarrisParams& params);

/// Corner closest to (row, col) in Euclidean distance; ties go to the higher
/// response, then the smaller (row, col). nullopt when the set is empty.
std::optional<Corner> nearest_corner(double row, double col, const CornerSet& corners);

}  // namespace sliceparse

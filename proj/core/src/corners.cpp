#include "sliceparse/corners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <spdlog/spdlog.h>
#include <stdexcept>

namespace sliceparse {

void check(const HarrisParams& params) {
  if (params.window_radius < 1) throw std::invalid_argument("harris: window_radius must be >= 1");
  if (!(params.threshold > 0.0)) throw std::invalid_argument("harris: threshold must be > 0");
  if (params.nms_radius < 1) throw std::invalid_argument("harris: nms_radius must be >= 1");
  if (params.max_corners < 1) throw std::invalid_argument("harris: max_corners must be >= 1");
  if (params.k < 0.01 || params.k > 0.25) {
    spdlog::warn("harris: k = {} is outside the usual range [0.01, 0.25]", params.k);
  }
}

RealImage box_blur3(const RealImage& img) {
  RealImage out(img.rows(), img.cols());
  const int R = img.rows(), C = img.cols();
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) {
      double s = 0.0;
      for (int dr = -1; dr <= 1; ++dr) {
        const int rr = std::clamp(r + dr, 0, R - 1);
        for (int dc = -1; dc <= 1; ++dc) s += img(rr, std::clamp(c + dc, 0, C - 1));
      }
      out(r, c) = s / 9.0;
    }
  }
  return out;
}

RealImage harris_response(const Mask& mask, const HarrisParams& params) {
  if (mask.rows() < 3 || mask.cols() < 3) {
    throw std::invalid_argument("harris: image must be at least 3x3");
  }
  const int R = mask.rows(), C = mask.cols();
  RealImage img(R, C);
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) img(r, c) = mask(r, c) ? 1.0 : 0.0;
  }
  if (params.smooth) img = box_blur3(img);

  RealImage ixx(R, C), iyy(R, C), ixy(R, C);
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) {
      const double ix = 0.5 * (img(r, std::min(c + 1, C - 1)) - img(r, std::max(c - 1, 0)));
      const double iy = 0.5 * (img(std::min(r + 1, R - 1), c) - img(std::max(r - 1, 0), c));
      ixx(r, c) = ix * ix;
      iyy(r, c) = iy * iy;
      ixy(r, c) = ix * iy;
    }
  }

  const int w = params.window_radius;
  RealImage response(R, C);
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) {
      double sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (int rr = std::max(0, r - w); rr <= std::min(R - 1, r + w); ++rr) {
        for (int cc = std::max(0, c - w); cc <= std::min(C - 1, c + w); ++cc) {
          sxx += ixx(rr, cc);
          syy += iyy(rr, cc);
          sxy += ixy(rr, cc);
        }
      }
      const double trace = sxx + syy;
      response(r, c) = (sxx * syy - sxy * sxy) - params.k * trace * trace;
    }
  }
  return response;
}

CornerSet detect_corners(const ProjectionImage& img, const HarrisParams& params) {
  check(params);
  CornerSet out{img.view, {}};
  const RealImage resp = harris_response(img.pixels, params);
  double max_resp = 0.0;
  for (double v : resp.data()) max_resp = std::max(max_resp, v);
  const double thr = params.relative_threshold ? params.threshold * max_resp : params.threshold;

  const int R = resp.rows(), C = resp.cols(), n = params.nms_radius;
  std::vector<Corner> candidates;
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) {
      const double v = resp(r, c);
      if (!(v > thr)) continue;
      bool is_max = true;
      for (int rr = std::max(0, r - n); rr <= std::min(R - 1, r + n) && is_max; ++rr) {
        for (int cc = std::max(0, c - n); cc <= std::min(C - 1, c + n); ++cc) {
          if (resp(rr, cc) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) candidates.push_back({r, c, v});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Corner& a, const Corner& b) {
    if (a.response != b.response) return a.response > b.response;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });
  for (const auto& cand : candidates) {
    const bool clear = std::none_of(out.points.begin(), out.points.end(), [&](const Corner& kept) {
      return std::max(std::abs(kept.row - cand.row), std::abs(kept.col - cand.col)) <= n;
    });
    if (!clear) continue;
    out.points.push_back(cand);
    if (static_cast<int>(out.points.size()) >= params.max_corners) break;
  }
  return out;
}

std::optional<Corner> nearest_corner(double row, double col, const CornerSet& corners) {
  if (corners.points.empty()) return std::nullopt;
  const Corner* best = nullptr;
  double best_d2 = 0.0;
  for (const auto& c : corners.points) {
    const double dr = c.row - row, dc = c.col - col;
    const double d2 = dr * dr + dc * dc;
    bool better = best == nullptr || d2 < best_d2;
    if (!better && d2 == best_d2) {
      if (c.response != best->response) {
        better = c.response > best->response;
      } else {
        better = std::pair(c.row, c.col) < std::pair(best->row, best->col);
      }
    }
    if (better) {
      best = &c;
      best_d2 = d2;
    }
  }
  return *best;
}

}  // namespace sliceparse

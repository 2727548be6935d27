#include "sliceparse/expert.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

namespace sliceparse {

double CandidateSegment::length() const {
  return std::hypot(static_cast<double>(p2.row - p1.row), static_cast<double>(p2.col - p1.col));
}

std::vector<Pixel> bresenham(Pixel a, Pixel b) {
  std::vector<Pixel> out;
  int r = a.row, c = a.col;
  const int dr = std::abs(b.row - a.row), dc = std::abs(b.col - a.col);
  const int sr = a.row < b.row ? 1 : -1, sc = a.col < b.col ? 1 : -1;
  int err = dc - dr;
  while (true) {
    out.push_back({r, c});
    if (r == b.row && c == b.col) break;
    const int e2 = 2 * err;
    if (e2 > -dr) {
      err -= dr;
      c += sc;
    }
    if (e2 < dc) {
      err += dc;
      r += sr;
    }
  }
  return out;
}

std::vector<CandidateSegment> candidate_segments(const ParseState& state) {
  std::vector<CandidateSegment> out;
  for (View view : kAllViews) {
    const auto& pts = state.corners[static_cast<std::size_t>(view)].points;
    std::set<std::pair<Pixel, Pixel>> seen;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Corner* best = nullptr;
      long long best_d2 = 0;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (pts[j].pixel() == pts[i].pixel()) continue;
        const long long dr = pts[j].row - pts[i].row, dc = pts[j].col - pts[i].col;
        const long long d2 = dr * dr + dc * dc;
        bool better = best == nullptr || d2 < best_d2;
        if (!better && d2 == best_d2) {
          better = pts[j].response != best->response ? pts[j].response > best->response
                                                     : pts[j].pixel() < best->pixel();
        }
        if (better) {
          best = &pts[j];
          best_d2 = d2;
        }
      }
      if (!best) continue;
      const Pixel a = std::min(pts[i].pixel(), best->pixel());
      const Pixel b = std::max(pts[i].pixel(), best->pixel());
      if (!seen.insert({a, b}).second) continue;
      CandidateSegment s;
      s.view = view;
      s.p1 = a;
      s.p2 = b;
      out.push_back(s);
    }
  }
  return out;
}

namespace {

Mask erased(const Mask& mask, const CandidateSegment& s) {
  Mask out = mask;
  for (const Pixel& p : bresenham(s.p1, s.p2)) {
    if (out.in_bounds(p.row, p.col)) out.at(p) = 0;
  }
  return out;
}

const Mask& silhouette(const ParseState& state, View view) {
  return state.projections[static_cast<std::size_t>(view)].pixels;
}

}  // namespace

std::vector<CandidateSegment> filter_separating(std::span<const CandidateSegment> segments,
                                                const ParseState& state) {
  std::vector<CandidateSegment> out;
  std::array<int, 3> before{-1, -1, -1};
  for (const auto& s : segments) {
    const auto vi = static_cast<std::size_t>(s.view);
    const Mask& mask = silhouette(state, s.view);
    if (before[vi] < 0) before[vi] = count_components(mask);
    const int after = count_components(erased(mask, s));
    if (after > before[vi]) {
      CandidateSegment kept = s;
      kept.component_count_delta = after - before[vi];
      out.push_back(kept);
    }
  }
  return out;
}

namespace {

long long leak_area(const Mask& mask, const CandidateSegment& s) {
  const Image<int> original = label_components(mask);
  std::set<int> touched;
  for (const Pixel& p : bresenham(s.p1, s.p2)) {
    if (original.in_bounds(p.row, p.col) && original.at(p) >= 0) touched.insert(original.at(p));
  }
  const Mask cut = erased(mask, s);
  const auto pieces = connected_components(cut);
  const std::vector<Pixel>* smallest = nullptr;
  // Largest-first order, so the last qualifying piece is the smallest one.
  for (const auto& piece : pieces) {
    if (touched.count(original.at(piece.front()))) smallest = &piece;
  }
  if (!smallest) return 0;
  int r0 = cut.rows(), r1 = -1, c0 = cut.cols(), c1 = -1;
  for (const Pixel& p : *smallest) {
    r0 = std::min(r0, p.row);
    r1 = std::max(r1, p.row);
    c0 = std::min(c0, p.col);
    c1 = std::max(c1, p.col);
  }
  long long inside = 0;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) inside += cut(r, c) ? 1 : 0;
  }
  return inside - static_cast<long long>(smallest->size());
}

}  // namespace

std::vector<CandidateSegment> score_segments(std::span<const CandidateSegment> segments,
                                             const ParseState& state) {
  std::vector<CandidateSegment> out(segments.begin(), segments.end());
  for (auto& s : out) s.leak_area = leak_area(silhouette(state, s.view), s);
  std::sort(out.begin(), out.end(), [](const CandidateSegment& a, const CandidateSegment& b) {
    if (a.leak_area != b.leak_area) return a.leak_area < b.leak_area;
    const double la = a.length(), lb = b.length();
    if (la != lb) return la < lb;
    if (a.view != b.view) return a.view < b.view;
    if (a.p1 != b.p1) return a.p1 < b.p1;
    return a.p2 < b.p2;
  });
  return out;
}

CutAction segment_action(const CandidateSegment& segment, const ParseState& state) {
  const Mask& m = silhouette(state, segment.view);
  const Point2 a = normalize_pixel(segment.p1.row, segment.p1.col, m.rows(), m.cols());
  const Point2 b = normalize_pixel(segment.p2.row, segment.p2.col, m.rows(), m.cols());
  return {a.x, a.y, b.x, b.y, view_code(segment.view)};
}

namespace {

Point2 to_point(Pixel p) { return {static_cast<double>(p.row), static_cast<double>(p.col)}; }

CutAction fallback_action(const ParseState& state, const VoxelGrid& remaining, const Cuboid& bbox,
                          const AxisHistogram& hist) {
  // Corner pairs: the evenest nonempty split.
  std::optional<CutAction> best;
  long long best_gap = std::numeric_limits<long long>::max();
  for (View view : kAllViews) {
    const auto& pts = state.corners[static_cast<std::size_t>(view)].points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const CutPlan plan = plan_cut(hist, bbox, view, to_point(pts[i].pixel()), to_point(pts[j].pixel()));
        if (plan.part_cells() == 0) continue;
        const long long gap = std::llabs(plan.low_cells - plan.high_cells);
        if (gap < best_gap) {
          best_gap = gap;
          CandidateSegment s;
          s.view = view;
          s.p1 = std::min(pts[i].pixel(), pts[j].pixel());
          s.p2 = std::max(pts[i].pixel(), pts[j].pixel());
          best = segment_action(s, state);
        }
      }
    }
  }
  if (best) return *best;

  // Center of the bounding box on the axis that balances the two sides best.
  int axis = 0;
  int coord = 0;
  best_gap = std::numeric_limits<long long>::max();
  for (int a = 0; a < 3; ++a) {
    const int mid = (bbox.min_corner[a] + bbox.max_corner[a] + 1) / 2;
    const long long low = hist.below(a, mid);
    const long long gap = std::llabs(hist.total - 2 * low);
    if (gap < best_gap) {
      best_gap = gap;
      axis = a;
      coord = mid;
    }
  }
  // A view whose image rows or columns run along `axis`.
  for (View view : kAllViews) {
    const auto [u, v] = perpendicular_axes(view_axis(view));
    const GridDims d = remaining.dims();
    const int rows = d[u], cols = d[v];
    if (u == axis) {
      const Point2 a = normalize_pixel(coord, 0, rows, cols), b = normalize_pixel(coord, cols - 1, rows, cols);
      return {a.x, a.y, b.x, b.y, view_code(view)};
    }
    if (v == axis) {
      const Point2 a = normalize_pixel(0, coord, rows, cols), b = normalize_pixel(rows - 1, coord, rows, cols);
      return {a.x, a.y, b.x, b.y, view_code(view)};
    }
  }
  return {};
}

}  // namespace

CutAction expert_action(const ParseState& state) {
  if (!state.remaining) throw std::invalid_argument("expert_action needs the remaining region");
  const VoxelGrid& remaining = *state.remaining;
  const auto bbox = remaining.bounding_box();
  if (!bbox) return {0.0, 0.0, 1.0, 0.0, view_code(View::Top)};
  const AxisHistogram hist = AxisHistogram::of(remaining);

  const auto ranked = score_segments(filter_separating(candidate_segments(state), state), state);
  for (const auto& s : ranked) {
    const CutPlan plan = plan_cut(hist, *bbox, s.view, to_point(s.p1), to_point(s.p2));
    if (plan.part_cells() > 0) return segment_action(s, state);
  }
  return fallback_action(state, remaining, *bbox, hist);
}

std::vector<Demonstration> generate_demonstrations(std::span<const VoxelGrid> shapes,
                                                   const EnvConfig& config, int episodes,
                                                   int jobs) {
  if (episodes < 0) throw std::invalid_argument("episode count must be nonnegative");
  const std::size_t total = shapes.size() * static_cast<std::size_t>(episodes);
  std::vector<Demonstration> out(total);

  auto play = [&](std::size_t n) {
    const std::size_t shape = n / static_cast<std::size_t>(episodes);
    ParseEnv env(config);
    ParseState state = env.reset(shapes[shape]);
    Demonstration demo;
    demo.shape_id = static_cast<int>(shape);
    while (!env.done()) {
      const CutAction action = expert_action(state);
      StepResult r = env.step(action);
      Transition t;
      t.state = std::move(state);
      t.action = action;
      t.reward = r.reward;
      t.next_state = r.next_state;
      t.done = r.done;
      t.expert_action = action;
      t.shape_id = demo.shape_id;
      demo.episode_return += r.reward;
      demo.transitions.push_back(stored(std::move(t)));
      state = std::move(r.next_state);
    }
    for (auto& t : demo.transitions) t.episode_return = demo.episode_return;
    out[n] = std::move(demo);
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), total);
  if (workers <= 1) {
    for (std::size_t n = 0; n < total; ++n) play(n);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t n; (n = next.fetch_add(1)) < total;) play(n);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace sliceparse

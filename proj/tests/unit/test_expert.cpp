#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sliceparse/expert.hpp"
#include "sliceparse/shapes.hpp"

using namespace sliceparse;

namespace {

// A state whose only non-empty view is Top, showing `mask`.
ParseState single_view_state(const Mask& mask) {
  ParseState s;
  for (View v : kAllViews) {
    const auto vi = static_cast<std::size_t>(v);
    s.projections[vi] = {v, v == View::Top ? mask : Mask(mask.rows(), mask.cols())};
    s.corners[vi] = detect_corners(s.projections[vi], HarrisParams{});
  }
  return s;
}

Mask rect(int rows, int cols, int r0, int r1, int c0, int c1) {
  Mask m(rows, cols);
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) m(r, c) = 1;
  return m;
}

bool is_corner(const ParseState& s, View v, Pixel p) {
  for (const Corner& c : s.corners[static_cast<std::size_t>(v)].points)
    if (c.row == p.row && c.col == p.col) return true;
  return false;
}

Mask erase(Mask m, const CandidateSegment& s) {
  for (const Pixel& p : bresenham(s.p1, s.p2)) m.at(p) = 0;
  return m;
}

using PixelSet = std::set<std::pair<int, int>>;

// Leak area from the definition: the smallest piece split off the component
// the segment crosses, boxed, minus its own pixels. -1 when the smallest
// piece is not unique.
long long leak_oracle(const Mask& mask, const CandidateSegment& s) {
  const auto before = oracle::components(mask);
  std::set<PixelSet> crossed;
  for (const Pixel& p : bresenham(s.p1, s.p2))
    for (const auto& comp : before)
      if (comp.count({p.row, p.col})) crossed.insert(comp);
  const Mask cut = erase(mask, s);
  std::vector<PixelSet> pieces;
  for (const auto& piece : oracle::components(cut))
    for (const auto& comp : crossed)
      if (comp.count(*piece.begin())) pieces.push_back(piece);
  if (pieces.empty()) return 0;
  std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  if (pieces.size() > 1 && pieces[0].size() == pieces[1].size()) return -1;
  int r0 = 1 << 30, r1 = -1, c0 = 1 << 30, c1 = -1;
  for (const auto& [r, c] : pieces[0]) {
    r0 = std::min(r0, r), r1 = std::max(r1, r), c0 = std::min(c0, c), c1 = std::max(c1, c);
  }
  long long inside = 0;
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) inside += cut(r, c);
  return inside - static_cast<long long>(pieces[0].size());
}

}  // namespace

TEST(Bresenham, EndpointsAndConnectivity) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> pos(-20, 20);
  for (int t = 0; t < 200; ++t) {
    const Pixel a{pos(rng), pos(rng)}, b{pos(rng), pos(rng)};
    const auto line = bresenham(a, b);
    ASSERT_FALSE(line.empty());
    EXPECT_EQ(line.front(), a);
    EXPECT_EQ(line.back(), b);
    EXPECT_EQ(static_cast<int>(line.size()), std::max(std::abs(b.row - a.row), std::abs(b.col - a.col)) + 1);
    for (std::size_t i = 1; i < line.size(); ++i) {
      EXPECT_LE(std::abs(line[i].row - line[i - 1].row), 1);
      EXPECT_LE(std::abs(line[i].col - line[i - 1].col), 1);
    }
  }
  EXPECT_EQ(bresenham({3, 4}, {3, 4}), (std::vector<Pixel>{Pixel{3, 4}}));
}

TEST(CandidateSegments, RectanglePairsShortSides) {
  const ParseState s = single_view_state(rect(32, 32, 4, 27, 10, 19));
  ASSERT_EQ(s.corners[static_cast<std::size_t>(View::Top)].points.size(), 4u);
  const auto segs = candidate_segments(s);
  ASSERT_EQ(segs.size(), 2u);
  for (const auto& seg : segs) {
    EXPECT_EQ(seg.view, View::Top);
    EXPECT_LT(seg.p1, seg.p2);
    // Short sides are horizontal: both endpoints on the same row.
    EXPECT_LE(std::abs(seg.p1.row - seg.p2.row), 1);
    EXPECT_GE(std::abs(seg.p1.col - seg.p2.col), 8);
  }
}

TEST(CandidateSegments, SingleCornerGivesNothing) {
  ParseState s = single_view_state(rect(16, 16, 4, 11, 4, 11));
  auto& pts = s.corners[static_cast<std::size_t>(View::Top)].points;
  pts.resize(1);
  EXPECT_TRUE(candidate_segments(s).empty());
}

TEST(CandidateSegments, EndpointsAreCorners) {
  ParseEnv env{EnvConfig{}};
  const ParseState s = env.reset(make_shape("plus", 32).grid);
  const auto segs = candidate_segments(s);
  EXPECT_FALSE(segs.empty());
  std::set<std::tuple<int, Pixel, Pixel>> unique;
  for (const auto& seg : segs) {
    EXPECT_TRUE(is_corner(s, seg.view, seg.p1));
    EXPECT_TRUE(is_corner(s, seg.view, seg.p2));
    EXPECT_NE(seg.p1, seg.p2);
    EXPECT_TRUE(unique.insert({static_cast<int>(seg.view), seg.p1, seg.p2}).second);
  }
}

TEST(FilterSeparating, AgreesWithFloodFill) {
  int kept_total = 0;
  for (const auto& named : experiment_set(32)) {
    ParseEnv env{EnvConfig{}};
    const ParseState s = env.reset(named.grid);
    const auto segs = candidate_segments(s);
    const auto kept = filter_separating(segs, s);
    std::size_t k = 0;
    for (const auto& seg : segs) {
      const Mask& m = s.projections[static_cast<std::size_t>(seg.view)].pixels;
      const long long delta = static_cast<long long>(oracle::components(erase(m, seg)).size()) -
                              static_cast<long long>(oracle::components(m).size());
      if (delta > 0) {
        ASSERT_LT(k, kept.size()) << named.name;
        EXPECT_EQ(kept[k].p1, seg.p1);
        EXPECT_EQ(kept[k].p2, seg.p2);
        EXPECT_EQ(kept[k].component_count_delta, delta);
        ++k;
      }
    }
    EXPECT_EQ(k, kept.size()) << named.name;
    kept_total += static_cast<int>(k);
  }
  EXPECT_GT(kept_total, 0);
}

TEST(FilterSeparating, InteriorSegmentDropped) {
  const ParseState s = single_view_state(rect(32, 32, 2, 29, 2, 29));
  CandidateSegment interior;
  interior.view = View::Top;
  interior.p1 = {10, 10};
  interior.p2 = {20, 20};
  EXPECT_TRUE(filter_separating(std::vector<CandidateSegment>{interior}, s).empty());
  EXPECT_TRUE(filter_separating(std::vector<CandidateSegment>{}, s).empty());
}

TEST(FilterSeparating, NeckIsKept) {
  // Two squares joined by a one-pixel-thick neck along row 15.
  Mask m = rect(32, 32, 4, 27, 2, 12);
  for (int r = 4; r <= 27; ++r)
    for (int c = 19; c <= 29; ++c) m(r, c) = 1;
  for (int c = 13; c < 19; ++c) m(15, c) = 1;
  const ParseState s = single_view_state(m);
  CandidateSegment neck;
  neck.view = View::Top;
  neck.p1 = {15, 14};
  neck.p2 = {15, 17};
  const auto kept = filter_separating(std::vector<CandidateSegment>{neck}, s);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].component_count_delta, 1);
}

TEST(ScoreSegments, LeakAreaMatchesOracleAndOrder) {
  for (const auto& named : experiment_set(32)) {
    ParseEnv env{EnvConfig{}};
    const ParseState s = env.reset(named.grid);
    const auto scored = score_segments(filter_separating(candidate_segments(s), s), s);
    for (std::size_t i = 0; i < scored.size(); ++i) {
      const long long want = leak_oracle(s.projections[static_cast<std::size_t>(scored[i].view)].pixels, scored[i]);
      if (want >= 0) EXPECT_EQ(scored[i].leak_area, want) << named.name;
      if (i == 0) continue;
      const auto& a = scored[i - 1];
      const auto& b = scored[i];
      EXPECT_LE(a.leak_area, b.leak_area);
      if (a.leak_area == b.leak_area) EXPECT_LE(a.length(), b.length());
    }
  }
}

TEST(ScoreSegments, RectangularLimbBeforeDiagonalAndShorterFirst) {
  // A straight cut splits off a clean strip; a diagonal one a triangle whose box leaks.
  Mask m(40, 40);
  for (int r = 10; r < 30; ++r)
    for (int c = 10; c < 30; ++c) m(r, c) = 1;
  const ParseState s = single_view_state(m);
  CandidateSegment a, b;
  a.view = b.view = View::Top;
  a.p1 = {10, 14};  // cuts off columns 10..13 fully across rows 10..29
  a.p2 = {29, 14};
  b.p1 = {10, 17};  // diagonal: the split-off piece is a triangle
  b.p2 = {29, 10};
  const auto scored = score_segments(std::vector<CandidateSegment>{b, a}, s);
  ASSERT_EQ(scored.size(), 2u);
  EXPECT_EQ(scored[0].p1, a.p1);
  EXPECT_EQ(scored[0].leak_area, 0);
  EXPECT_GT(scored[1].leak_area, 0);
  EXPECT_EQ(scored[1].leak_area, leak_oracle(m, b));

  CandidateSegment shorter = a;
  shorter.p1 = {12, 14};
  shorter.p2 = {27, 14};
  // Neither separates, so both have zero leak and length decides.
  const auto tied = score_segments(std::vector<CandidateSegment>{a, shorter}, s);
  EXPECT_EQ(tied[0].p1, shorter.p1);
}

TEST(ExpertAction, SegmentActionEncoding) {
  ParseEnv env{EnvConfig{}};
  const ParseState s = env.reset(make_shape("dumbbell", 32).grid);
  const auto scored = score_segments(filter_separating(candidate_segments(s), s), s);
  ASSERT_FALSE(scored.empty());
  const CandidateSegment& top = scored.front();
  const CutAction a = segment_action(top, s);
  const Mask& img = s.projections[static_cast<std::size_t>(top.view)].pixels;
  EXPECT_DOUBLE_EQ(a.x1, static_cast<double>(top.p1.row) / (img.rows() - 1));
  EXPECT_DOUBLE_EQ(a.y1, static_cast<double>(top.p1.col) / (img.cols() - 1));
  EXPECT_DOUBLE_EQ(a.x2, static_cast<double>(top.p2.row) / (img.rows() - 1));
  EXPECT_DOUBLE_EQ(a.y2, static_cast<double>(top.p2.col) / (img.cols() - 1));
  EXPECT_DOUBLE_EQ(a.c, view_code(top.view));
  EXPECT_EQ(expert_action(s), a);
}

TEST(ExpertAction, SnappedPointsAreSegmentEndpoints) {
  for (const auto& named : experiment_set(32)) {
    ParseEnv env{EnvConfig{}};
    ParseState s = env.reset(named.grid);
    while (!env.done()) {
      const auto scored = score_segments(filter_separating(candidate_segments(s), s), s);
      const CutAction a = expert_action(s);
      StepResult r = env.step(a);
      for (const auto& seg : scored) {
        if (segment_action(seg, s) != a) continue;
        EXPECT_EQ(r.plan.p1, (Point2{static_cast<double>(seg.p1.row), static_cast<double>(seg.p1.col)}));
        EXPECT_EQ(r.plan.p2, (Point2{static_cast<double>(seg.p2.row), static_cast<double>(seg.p2.col)}));
        break;
      }
      s = std::move(r.next_state);
    }
  }
}

TEST(ExpertAction, ConvexBlobFallsBackToBalancedCenterCut) {
  const Cuboid b = cells(6, 26, 9, 23, 4, 28);
  const VoxelGrid shape = box_union(32, std::span<const Cuboid>(&b, 1));
  EnvConfig config;
  ParseEnv env(config);
  const ParseState s = env.reset(shape);
  EXPECT_TRUE(filter_separating(candidate_segments(s), s).empty());
  const StepResult r = env.step(expert_action(s));
  ASSERT_TRUE(r.part_nonempty);
  // Every axis of this box has its midpoint at 16, and each halves it exactly.
  EXPECT_EQ(r.plan.low_cells, r.plan.high_cells);
  EXPECT_EQ(r.plan.coord, 16);
}

TEST(ExpertAction, NeedsRemainingRegion) {
  EXPECT_THROW(expert_action(ParseState{}), std::invalid_argument);
}

TEST(Demonstrations, BasicAndDeterministic) {
  std::vector<VoxelGrid> shapes;
  for (const char* name : {"dumbbell", "l", "t"}) shapes.push_back(make_shape(name, 32).grid);
  const EnvConfig config;
  const auto demos = generate_demonstrations(shapes, config, 1);
  ASSERT_EQ(demos.size(), 3u);
  const auto threaded = generate_demonstrations(shapes, config, 1, 3);
  for (std::size_t d = 0; d < demos.size(); ++d) {
    EXPECT_EQ(demos[d].shape_id, static_cast<int>(d));
    ASSERT_GE(demos[d].transitions.size(), 1u);
    ASSERT_EQ(threaded[d].transitions.size(), demos[d].transitions.size());
    double total = 0.0;
    for (std::size_t i = 0; i < demos[d].transitions.size(); ++i) {
      const Transition& t = demos[d].transitions[i];
      ASSERT_TRUE(t.expert_action);
      EXPECT_EQ(*t.expert_action, t.action);
      EXPECT_FALSE(t.state.remaining);
      EXPECT_EQ(t.done, i + 1 == demos[d].transitions.size());
      EXPECT_EQ(t.action, threaded[d].transitions[i].action);
      EXPECT_EQ(t.reward, threaded[d].transitions[i].reward);
      total += t.reward;
    }
    EXPECT_DOUBLE_EQ(demos[d].episode_return, total);
  }

  // The first dumbbell action is the neck cut, and the actions replay to the same rewards.
  ParseEnv env(config);
  const ParseState s0 = env.reset(shapes[0]);
  EXPECT_EQ(demos[0].transitions[0].action, expert_action(s0));
  for (const Transition& t : demos[0].transitions) EXPECT_EQ(env.step(t.action).reward, t.reward);
}

TEST(Demonstrations, ExpertBeatsRandomOnNeckedBoxes) {
  std::vector<VoxelGrid> shapes;
  for (const char* name : {"dumbbell", "dumbbell_uneven"}) shapes.push_back(make_shape(name, 32).grid);
  const EnvConfig config;
  auto mean_part_iou = [](const EpisodeResult& r) {
    double s = 0.0;
    for (const Part& p : r.parts) s += p.surface_iou;
    return r.parts.empty() ? 0.0 : s / static_cast<double>(r.parts.size());
  };
  double expert = 0.0, random = 0.0;
  for (const VoxelGrid& shape : shapes) expert += mean_part_iou(run_episode(shape, config, expert_action)) / 2;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    const Policy policy = [&](const ParseState&) { return fixtures::random_action(rng); };
    random += mean_part_iou(run_episode(shapes[static_cast<std::size_t>(seed % 2)], config, policy)) / 20;
  }
  EXPECT_GE(expert, random);
}

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sliceparse/env.hpp"
#include "sliceparse/expert.hpp"
#include "sliceparse/shapes.hpp"

using namespace sliceparse;

namespace {

// Silhouette along the view axis straight from the cells.
Mask silhouette(const VoxelGrid& g, View view) {
  const auto [u, v] = perpendicular_axes(view_axis(view));
  const GridDims d = g.dims();
  Mask m(d[u], d[v]);
  for (int i = 0; i < d.nx; ++i)
    for (int j = 0; j < d.ny; ++j)
      for (int k = 0; k < d.nz; ++k) {
        if (!g(i, j, k)) continue;
        const int idx[3] = {i, j, k};
        m(idx[u], idx[v]) = 1;
      }
  return m;
}

VoxelGrid centered_box() {
  const Cuboid b = cells(6, 26, 9, 23, 4, 28);
  return box_union(32, std::span<const Cuboid>(&b, 1));
}

CutAction empty_side_action(View view) { return {0.0, 0.0, 0.0, 0.0, view_code(view)}; }

}  // namespace

TEST(CutAction, ClampAndView) {
  const CutAction a{-0.5, 1.5, std::numeric_limits<double>::quiet_NaN(), 0.25, 2.0};
  EXPECT_EQ(a.clamped(), (CutAction{0.0, 1.0, 0.0, 0.25, 1.0}));
  EXPECT_EQ(a.view(), View::End);
  EXPECT_EQ((CutAction{0, 0, 0, 0, 0.0}).view(), View::Front);
  EXPECT_EQ((CutAction{0, 0, 0, 0, 0.34}).view(), View::Top);
  EXPECT_EQ((CutAction{0, 0, 0, 0, 0.999}).view(), View::End);
  for (View v : kAllViews) EXPECT_EQ((CutAction{0, 0, 0, 0, view_code(v)}).view(), v);
  EXPECT_EQ(CutAction::from_array(a.to_array()).to_array()[3], 0.25);
}

TEST(CutAction, PixelNormalizationRoundTrip) {
  const Point2 n = normalize_pixel(7, 30, 32, 31);
  EXPECT_DOUBLE_EQ(n.x, 7.0 / 31);
  EXPECT_DOUBLE_EQ(n.y, 1.0);
  const Point2 p = denormalize_point(n.x, n.y, 32, 31);
  EXPECT_NEAR(p.x, 7.0, 1e-12);
  EXPECT_NEAR(p.y, 30.0, 1e-12);
}

TEST(EnvConfig, Validation) {
  EXPECT_NO_THROW(check(EnvConfig{}));
  EnvConfig c;
  c.max_steps = 0;
  EXPECT_THROW(check(c), std::invalid_argument);
  c = EnvConfig{};
  c.lambda = -1;
  EXPECT_THROW(check(c), std::invalid_argument);
  c = EnvConfig{};
  c.coverage_stop = 0.0;
  EXPECT_THROW(check(c), std::invalid_argument);
  c.coverage_stop = 1.5;
  EXPECT_THROW(ParseEnv{c}, std::invalid_argument);
}

TEST(PlanCut, MatchesBruteForceSplit) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> coord(0, 23);
  for (int trial = 0; trial < 60; ++trial) {
    const VoxelGrid g = oracle::random_grid(rng, 24, 0.3);
    const auto bbox = g.bounding_box();
    ASSERT_TRUE(bbox);
    const View view = kAllViews[static_cast<std::size_t>(trial % 3)];
    const Point2 p1{coord(rng), coord(rng)}, p2{coord(rng), coord(rng)};
    const CutPlan plan = plan_cut(AxisHistogram::of(g), *bbox, view, p1, p2);

    const auto [u, v] = perpendicular_axes(view_axis(view));
    const bool horizontal = std::abs(p2.y - p1.y) >= std::abs(p2.x - p1.x);
    EXPECT_EQ(axis_index(plan.axis), horizontal ? u : v);
    const double mean = horizontal ? (p1.x + p2.x) / 2 : (p1.y + p2.y) / 2;
    EXPECT_EQ(plan.coord, static_cast<int>(std::floor(mean + 0.5)));

    long long low = 0, high = 0;
    const GridDims d = g.dims();
    for (int i = 0; i < d.nx; ++i)
      for (int j = 0; j < d.ny; ++j)
        for (int k = 0; k < d.nz; ++k) {
          if (!g(i, j, k)) continue;
          const int idx[3] = {i, j, k};
          (idx[axis_index(plan.axis)] < plan.coord ? low : high) += 1;
          EXPECT_TRUE((idx[axis_index(plan.axis)] < plan.coord ? plan.low : plan.high).contains(i, j, k));
        }
    EXPECT_EQ(plan.low_cells, low);
    EXPECT_EQ(plan.high_cells, high);
    EXPECT_EQ(plan.part_is_low, low <= high);
  }
}

TEST(ParseEnv, ResetOnBox) {
  const VoxelGrid shape = centered_box();
  ParseEnv env{EnvConfig{}};
  const ParseState s = env.reset(shape);
  EXPECT_EQ(s.step_index, 0);
  ASSERT_TRUE(s.remaining);
  EXPECT_EQ(*s.remaining, shape);
  const int max_corners = EnvConfig{}.harris.max_corners;
  for (View view : kAllViews) {
    const auto vi = static_cast<std::size_t>(view);
    const Mask& img = s.projections[vi].pixels;
    EXPECT_EQ(img, silhouette(shape, view));
    ASSERT_EQ(s.corners[vi].points.size(), 4u) << to_string(view);
    ASSERT_EQ(static_cast<int>(s.corner_lists[vi].size()), max_corners);
    for (std::size_t n = 0; n < s.corner_lists[vi].size(); ++n) {
      const Point2 p = s.corner_lists[vi][n];
      if (n < 4) {
        const Corner& c = s.corners[vi].points[n];
        EXPECT_DOUBLE_EQ(p.x, static_cast<double>(c.row) / (img.rows() - 1));
        EXPECT_DOUBLE_EQ(p.y, static_cast<double>(c.col) / (img.cols() - 1));
      } else {
        EXPECT_EQ(p, kNoCorner);
      }
    }
  }
  // Top view: rows along X in [6, 26), columns along Y in [9, 23).
  const Point2 truth[4] = {{5.5, 8.5}, {5.5, 22.5}, {25.5, 8.5}, {25.5, 22.5}};
  for (const Point2& t : truth) {
    double best = 1e9;
    for (const Corner& c : s.corners[static_cast<std::size_t>(View::Top)].points)
      best = std::min(best, std::hypot(c.row - t.x, c.col - t.y));
    EXPECT_LE(best, 1.0);
  }
}

TEST(ParseEnv, ResetErrors) {
  ParseEnv env{EnvConfig{}};
  EXPECT_THROW(env.reset(VoxelGrid(GridDims{8, 8, 8})), std::invalid_argument);
  VoxelGrid thin(GridDims{8, 2, 8});
  thin.set(1, 1, 1, true);
  EXPECT_THROW(env.reset(thin), std::invalid_argument);
}

TEST(ParseEnv, ResetProjectsLSolid) {
  const VoxelGrid shape = make_shape("l", 32).grid;
  ParseEnv env{EnvConfig{}};
  const ParseState s = env.reset(shape);
  for (View view : kAllViews) EXPECT_EQ(s.projections[static_cast<std::size_t>(view)].pixels, silhouette(shape, view));
}

TEST(ParseEnv, EmptySideCutIsPenalized) {
  const VoxelGrid shape = centered_box();
  EnvConfig config;
  config.snap_to_corners = false;
  ParseEnv env(config);
  env.reset(shape);
  const StepResult r = env.step(empty_side_action(View::Top));
  EXPECT_EQ(r.reward, config.empty_penalty);
  EXPECT_FALSE(r.part_nonempty);
  EXPECT_TRUE(r.part_mesh.empty());
  EXPECT_EQ(env.remaining(), shape);
  EXPECT_EQ(r.remaining_cells, shape.count());
  EXPECT_EQ(r.next_state.step_index, 1);
  EXPECT_TRUE(env.parts().empty());
}

TEST(ParseEnv, RewardMatchesOracleTerms) {
  std::mt19937_64 rng(22);
  for (const auto& named : experiment_set(32)) {
    EnvConfig config;
    config.lambda = 0.7;
    ParseEnv env(config);
    env.reset(named.grid);
    while (!env.done()) {
      const std::size_t before = env.remaining().count();
      const std::size_t parts_before = env.parts().size();
      const StepResult r = env.step(fixtures::random_action(rng));
      if (!r.part_nonempty) {
        EXPECT_EQ(r.reward, config.empty_penalty);
        continue;
      }
      ASSERT_EQ(env.parts().size(), parts_before + 1);
      const Part& part = env.parts().back();
      EXPECT_LT(env.remaining().count(), before);
      EXPECT_EQ(part.cells.count() + env.remaining().count(), before);
      EXPECT_EQ(part.cells, clip(part.cells, r.part));
      const double expected = oracle::volume_iou(part.cells, named.grid) +
                              config.lambda * oracle::surface_iou(voxelize_into(r.part_mesh, named.grid), part.cells);
      EXPECT_NEAR(r.reward, expected, 1e-12) << named.name;
      EXPECT_LE(r.reward, 1.0 + config.lambda);
    }
  }
}

TEST(ParseEnv, DumbbellNeckCutIsolatesLobe) {
  const VoxelGrid shape = make_shape("dumbbell", 32).grid;
  ParseEnv env{EnvConfig{}};
  const ParseState s = env.reset(shape);
  const StepResult r = env.step(expert_action(s));
  ASSERT_TRUE(r.part_nonempty);
  const Part& part = env.parts().front();
  // The part is one lobe (z in [2, 11) or [21, 30)) with at most its half of the neck.
  const bool low = part.cells(16, 16, 5);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j)
      for (int k = 0; k < 32; ++k) {
        const bool in_lobe = low ? (k >= 2 && k < 11) : (k >= 21 && k < 30);
        if (shape(i, j, k) && in_lobe) EXPECT_TRUE(part.cells(i, j, k));
        if (part.cells(i, j, k)) EXPECT_TRUE(low ? k < 16 : k >= 16);
      }
  EXPECT_GE(oracle::surface_iou(voxelize_into(r.part_mesh, shape), part.cells), 0.9);
}

TEST(ParseEnv, StepAfterDoneThrows) {
  EnvConfig config;
  config.max_steps = 1;
  ParseEnv env(config);
  env.reset(centered_box());
  EXPECT_TRUE(env.step(CutAction{0.5, 0.1, 0.5, 0.9, 0.5}).done);
  try {
    env.step(CutAction{});
    FAIL() << "expected a throw";
  } catch (const std::logic_error& e) {
    EXPECT_STREQ(e.what(), "episode finished");
  }
}

TEST(ParseEnv, CoverageStopEndsEpisode) {
  // A large box plus a 4-cell nub that the first useful cut removes.
  const Cuboid boxes[2] = {cells(2, 30, 2, 30, 2, 28), cells(14, 16, 14, 16, 29, 30)};
  const VoxelGrid shape = box_union(32, boxes);
  EnvConfig config;
  config.coverage_stop = 1e-4;
  config.snap_to_corners = false;
  ParseEnv env(config);
  env.reset(shape);
  EXPECT_FALSE(env.step(empty_side_action(View::Front)).done);
  // Front view (rows X, columns Z): a vertical line at column 29.
  const double col = 29.0 / 31;
  const StepResult r = env.step(CutAction{0.1, col, 0.9, col, view_code(View::Front)});
  EXPECT_EQ(r.plan.axis, Axis::Z);
  EXPECT_EQ(r.plan.coord, 29);
  EXPECT_EQ(r.plan.part_cells(), 4);
  EXPECT_TRUE(r.done);
  EXPECT_NEAR(env.coverage(), 4.0 / static_cast<double>(shape.count()), 1e-15);
}

TEST(ParseEnv, DeterministicSteps) {
  std::mt19937_64 rng(23);
  const VoxelGrid shape = make_shape("plus", 32).grid;
  for (int t = 0; t < 10; ++t) {
    const CutAction a = fixtures::random_action(rng);
    ParseEnv e1{EnvConfig{}}, e2{EnvConfig{}};
    e1.reset(shape);
    e2.reset(shape);
    const StepResult r1 = e1.step(a), r2 = e2.step(a);
    EXPECT_EQ(r1.reward, r2.reward);
    EXPECT_EQ(r1.part_mesh, r2.part_mesh);
    EXPECT_EQ(e1.remaining(), e2.remaining());
  }
}

TEST(RunEpisode, DegeneratePolicyGivesOnePart) {
  EnvConfig config;
  config.snap_to_corners = false;
  config.max_steps = 3;
  const VoxelGrid shape = centered_box();
  const EpisodeResult r = run_episode(shape, config, [](const ParseState&) { return empty_side_action(View::Top); });
  EXPECT_EQ(r.steps, 3);
  ASSERT_EQ(r.parts.size(), 1u);
  EXPECT_EQ(r.parts[0].cells, shape);
  EXPECT_DOUBLE_EQ(r.total_reward, 3 * config.empty_penalty);
  EXPECT_EQ(r.final_mesh, r.parts[0].mesh);
  EXPECT_NEAR(r.surface_iou, oracle::surface_iou(voxelize_into(r.final_mesh, shape), shape), 1e-12);
  EXPECT_GT(r.surface_iou, 0.9);
}

TEST(RunEpisode, ExpertSplitsPlusIntoThreeOrMoreParts) {
  const VoxelGrid shape = make_shape("plus", 32).grid;
  const EpisodeResult r = run_episode(shape, EnvConfig{}, expert_action);
  EXPECT_GE(r.parts.size(), 3u);
  VoxelGrid seen = shape.empty_like();
  for (const Part& p : r.parts)
    for (std::size_t f = 0; f < seen.cells().size(); ++f) {
      if (!p.cells.cells()[f]) continue;
      EXPECT_FALSE(seen.cells()[f]);
      seen.cells()[f] = 1;
    }
  EXPECT_EQ(seen, shape);
  TriMesh concatenated;
  for (const Part& p : r.parts) concatenated.append(p.mesh);
  EXPECT_EQ(r.final_mesh, concatenated);
}

TEST(RunEpisode, FinalizeIsIdempotent) {
  ParseEnv env{EnvConfig{}};
  env.reset(make_shape("t", 32).grid);
  env.step(CutAction{0.2, 0.2, 0.8, 0.2, 0.5});
  env.finalize();
  const std::size_t n = env.parts().size();
  env.finalize();
  EXPECT_EQ(env.parts().size(), n);
  EXPECT_TRUE(env.done());
  EXPECT_FALSE(env.remaining().any());
}

TEST(RunEpisode, TraceLines) {
  std::ostringstream trace;
  const EpisodeResult r = run_episode(make_shape("l", 32).grid, EnvConfig{}, expert_action, nullptr, &trace);
  std::istringstream in(trace.str());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("step").get<int>(), n);
    EXPECT_EQ(j.at("action").size(), 5u);
    EXPECT_EQ(j.at("snapped_points").size(), 2u);
    EXPECT_TRUE(j.at("cut_axis").is_string());
    EXPECT_TRUE(j.at("cut_coord").is_number_integer());
    EXPECT_DOUBLE_EQ(j.at("reward").get<double>(), r.rewards[static_cast<std::size_t>(n)]);
    EXPECT_TRUE(j.at("remaining_cells").is_number_unsigned());
    ++n;
  }
  EXPECT_EQ(n, r.steps);
}

#include <benchmark/benchmark.h>

#include "sliceparse/corners.hpp"
#include "sliceparse/geomcore.hpp"
#include "sliceparse/shapes.hpp"

using namespace sliceparse;

static void BM_SurfaceIou(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const VoxelGrid a = make_shape("dumbbell", n).grid;
  const VoxelGrid b = make_shape("dumbbell_uneven", n).grid;
  for (auto _ : state) benchmark::DoNotOptimize(surface_iou(a, b));
}
BENCHMARK(BM_SurfaceIou)->Arg(32)->Arg(64);

static void BM_ChamferL1(benchmark::State& state) {
  const TriMesh a = grid_mesh(make_shape("t", 32).grid);
  const TriMesh b = grid_mesh(make_shape("t_offset", 32).grid);
  const int samples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(chamfer_l1(a, b, samples));
}
BENCHMARK(BM_ChamferL1)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

static void BM_HarrisCorners(benchmark::State& state) {
  const VoxelGrid g = make_shape("plus", 32).grid;
  const ProjectionImage img = project(g, View::Front);
  const HarrisParams params;
  for (auto _ : state) benchmark::DoNotOptimize(detect_corners(img, params));
}
BENCHMARK(BM_HarrisCorners);

#include <benchmark/benchmark.h>

#include "sliceparse/env.hpp"
#include "sliceparse/expert.hpp"
#include "sliceparse/shapes.hpp"

using namespace sliceparse;

// One expert cut, including the reset it starts from.
static void BM_EnvResetAndExpertStep(benchmark::State& state) {
  const VoxelGrid shape = make_shape("dumbbell", 32).grid;
  ParseEnv env(EnvConfig{});
  for (auto _ : state) {
    const ParseState s = env.reset(shape);
    benchmark::DoNotOptimize(env.step(expert_action(s)));
  }
}
BENCHMARK(BM_EnvResetAndExpertStep)->Unit(benchmark::kMicrosecond);

static void BM_ExpertEpisode(benchmark::State& state) {
  const VoxelGrid shape = make_shape("plus", 32).grid;
  const EnvConfig config;
  const Policy expert = [](const ParseState& s) { return expert_action(s); };
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(shape, config, expert));
}
BENCHMARK(BM_ExpertEpisode)->Unit(benchmark::kMillisecond);

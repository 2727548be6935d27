#include <benchmark/benchmark.h>

#include "sliceparse/expert.hpp"
#include "sliceparse/shapes.hpp"
#include "sliceparse/trainer.hpp"

using namespace sliceparse;

namespace {

// Encoded expert transitions on the experiment shapes.
std::vector<Transition> encoded_demos(const Trainer& trainer) {
  std::vector<VoxelGrid> shapes;
  for (auto& s : experiment_set(32)) shapes.push_back(std::move(s.grid));
  std::vector<Transition> out;
  for (auto& d : generate_demonstrations(shapes, EnvConfig{}, 1)) {
    for (auto& t : d.transitions) {
      trainer.encode(t);
      out.push_back(std::move(t));
    }
  }
  return out;
}

TransitionBatch first_batch(const std::vector<Transition>& items, int size) {
  TransitionBatch batch;
  for (int i = 0; i < size; ++i) batch.push_back(&items[static_cast<std::size_t>(i) % items.size()]);
  return batch;
}

}  // namespace

static void BM_CriticUpdate(benchmark::State& state) {
  Trainer trainer(NetConfig{}, TrainerConfig{});
  const auto items = encoded_demos(trainer);
  const TransitionBatch batch = first_batch(items, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(trainer.critic_update(batch));
}
BENCHMARK(BM_CriticUpdate)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_ActorUpdate(benchmark::State& state) {
  Trainer trainer(NetConfig{}, TrainerConfig{});
  const auto items = encoded_demos(trainer);
  const TransitionBatch batch = first_batch(items, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(trainer.actor_update(batch, 0.5));
}
BENCHMARK(BM_ActorUpdate)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

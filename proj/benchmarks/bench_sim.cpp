#include <benchmark/benchmark.h>

#include "dlo/env/insertion.hpp"
#include "dlo/sim/step.hpp"

using namespace dlo;

static void BM_RopeStep(benchmark::State& state) {
  const double s = state.range(0) / 100.0;
  const sim::RopeParams params = sim::flex_sweep_to_params(s, 40);
  sim::RopeState rope = sim::init_rope(params, Vec3(0, 0, 0.4), Vec3(1, 0, 0));
  rope.grasped_index = 0;
  rope.grasp_target = Vec3(0, 0, 0.4);
  sim::World world;
  for (auto _ : state) {
    rope = sim::step(rope, params, world);
    benchmark::DoNotOptimize(rope.positions[39]);
  }
}
BENCHMARK(BM_RopeStep)->Arg(5)->Arg(50)->Arg(100);

static void BM_SettleLabelRig(benchmark::State& state) {
  const double s = state.range(0) / 100.0;
  for (auto _ : state) {
    const sim::RopeParams params = sim::flex_sweep_to_params(s, 20);
    sim::RopeState rope = sim::init_rope(params, Vec3(10 * params.rest_len, 0, 0), Vec3(-1, 0, 0));
    rope.grasped_index = 10;
    rope.grasp_target = rope.positions[10];
    rope.aux_pins.push_back({11, rope.positions[11]});
    sim::World world;
    world.floor = false;
    const sim::SettleResult res = sim::settle_quasi_static(rope, params, world, 2000, 1e-3);
    benchmark::DoNotOptimize(res.steps);
  }
}
BENCHMARK(BM_SettleLabelRig)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_Episode(benchmark::State& state) {
  const env::EnvConfig cfg = env::oracle_smoke_config();
  for (auto _ : state) {
    auto [obs, scene] = env::reset(cfg, 2024);
    const env::EpisodeOutcome out =
        env::execute_episode(scene, env::oracle_smoke_action(scene));
    benchmark::DoNotOptimize(out.reward);
  }
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "hexwar/behaviors.hpp"
#include "hexwar/episode.hpp"
#include "hexwar/hierarchy.hpp"
#include "hexwar/mlp.hpp"
#include "hexwar/observation.hpp"
#include "hexwar/scenario.hpp"

using namespace hexwar;

namespace {

Scenario brigade() { return load_scenario_file(std::string(HEXWAR_SCENARIO_DIR) + "/brigade20.json"); }

void BM_EncodeLocal(benchmark::State& state) {
  const GameState s = initial_state(brigade(), 0);
  const LocalEncoder enc{EncoderParams{}};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(enc.encode(s, s.units[i++ % s.units.size()].id));
  }
}
BENCHMARK(BM_EncodeLocal);

void BM_EncodeGlobal(benchmark::State& state) {
  const GameState s = initial_state(brigade(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(encode_global(s, 4));
}
BENCHMARK(BM_EncodeGlobal);

void BM_Step(benchmark::State& state) {
  const Scenario sc = brigade();
  Rng rng(1);
  GameState s = initial_state(sc, 0);
  for (auto _ : state) {
    auto unit = unit_on_move(s);
    if (!unit) {
      state.PauseTiming();
      s = initial_state(sc, rng());
      unit = unit_on_move(s);
      state.ResumeTiming();
    }
    const auto legal = legal_actions(s, *unit);
    benchmark::DoNotOptimize(step(s, *unit, legal[uniform_index(rng, legal.size())]));
  }
}
BENCHMARK(BM_Step);

void BM_Episode(benchmark::State& state) {
  const Scenario sc = brigade();
  RandomPolicy blue;
  GreedyAttackPolicy red;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(sc, blue, red, seed++));
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

void BM_MlpForward(benchmark::State& state) {
  Rng rng(2);
  const Mlp net = Mlp::random({224, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 13}, rng);
  const std::vector<double> x(224, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_MlpForward)->Arg(64)->Arg(128);

void BM_MlpGradientBatch(benchmark::State& state) {
  Rng rng(3);
  const Mlp net = Mlp::random({224, 64, 64, 13}, rng);
  const Eigen::MatrixXd in = Eigen::MatrixXd::Constant(224, state.range(0), 0.25);
  const Eigen::MatrixXd up = Eigen::MatrixXd::Constant(13, state.range(0), 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(net.gradient_batch(in, up));
}
BENCHMARK(BM_MlpGradientBatch)->Arg(32)->Arg(64);

void BM_Partition(benchmark::State& state) {
  const GameState s = initial_state(brigade(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(partition_units(s, Faction::blue));
}
BENCHMARK(BM_Partition);

void BM_HierarchicalAct(benchmark::State& state) {
  const GameState s = initial_state(brigade(), 0);
  HierarchicalPolicy h;
  for (auto _ : state) {
    h.reset(0);
    benchmark::DoNotOptimize(h.act(s, *unit_on_move(s)));
  }
}
BENCHMARK(BM_HierarchicalAct);

}  // namespace

BENCHMARK_MAIN();

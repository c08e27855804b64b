#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "genv2v/agents.hpp"
#include "genv2v/config.hpp"
#include "genv2v/env.hpp"
#include "genv2v/neural.hpp"

using namespace genv2v;

namespace {

neural::Matrix batch_input(int rows, int cols) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  neural::Matrix m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

void BM_MlpForward(benchmark::State& state) {
  const auto batch = static_cast<int>(state.range(0));
  const auto net = neural::Mlp::init({74, 128, 64, 64}, 1);
  const auto x = batch_input(74, batch);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward_batch(x));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpForward)->Arg(1)->Arg(64);

void BM_MlpBackward(benchmark::State& state) {
  const auto net = neural::Mlp::init({74, 128, 64, 64}, 1);
  const auto x = batch_input(74, 64);
  const auto d = batch_input(64, 64);
  for (auto _ : state) benchmark::DoNotOptimize(net.backward(x, d));
}
BENCHMARK(BM_MlpBackward);

void BM_EnvStep(benchmark::State& state) {
  const config::ExperimentConfig cfg;
  env::Environment env(cfg.env_for(cfg.payload_bits, 1));
  env.reset(0);
  agents::RandomPolicy policy(7);
  std::uint64_t episode = 1;
  for (auto _ : state) {
    if (env.done()) env.reset(episode++);
    const auto obs = env.observations();
    benchmark::DoNotOptimize(env.step(policy.act(env, obs)));
  }
}
BENCHMARK(BM_EnvStep);

void BM_OracleSearch(benchmark::State& state) {
  config::ExperimentConfig cfg;
  auto& g = cfg.env.geometry;
  g.tx_rx_distance_m.resize(2);
  g.speed_mps.resize(2);
  g.cross_distance_m = {{0.0, 110.0}, {120.0, 0.0}};
  env::Environment env(cfg.env_for(cfg.payload_bits, 1));
  env.reset(0);
  for (auto _ : state) benchmark::DoNotOptimize(agents::oracle_search(env));
}
BENCHMARK(BM_OracleSearch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

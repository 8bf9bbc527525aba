#include <benchmark/benchmark.h>

#include "focal/random_instances.h"
#include "focal/synthesis.h"
#include "focal/theory.h"

namespace {

using namespace focal;

void BM_GroupRewards(benchmark::State& state) {
  random::Rng rng(1);
  const auto g = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto t = random::UniformTensor(rng, g, k, 10.0);
  const auto w = random::SparseWeights(rng, k);
  for (auto _ : state) benchmark::DoNotOptimize(GroupRewards(w, t, 1.0));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g * (g - 1)));
}
BENCHMARK(BM_GroupRewards)->Args({4, 8})->Args({8, 12})->Args({16, 24})->Args({64, 32});

void BM_Synthesize(benchmark::State& state) {
  random::Rng rng(2);
  const auto g = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto t = random::UniformTensor(rng, g, k, 10.0);
  const Rubric r = random::RandomRubric(rng, k, 10.0);
  const SynthesisConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(Synthesize(t, r, config));
}
BENCHMARK(BM_Synthesize)->Args({4, 8})->Args({8, 12})->Args({16, 24})->Args({64, 32});

void BM_EstimateMisallocation(benchmark::State& state) {
  random::Rng rng(3);
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto model = random::RandomLatentModel(rng, k);
  const Eigen::VectorXd a = random::NonnegativeDirection(rng, k);
  const std::int64_t n = 100'000;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(theory::EstimateMisallocation(a, model, n, ++seed));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EstimateMisallocation)->Arg(2)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();

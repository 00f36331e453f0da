#include <benchmark/benchmark.h>

#include "decole/prune.h"
#include "decole/synth.h"

namespace decole {
namespace {

const LabeledDataset& DefaultPopulation() {
  static const LabeledDataset data = InjectNoise(
      GeneratePopulation(SynthConfig{}), NoiseSpec::Default(), 5);
  return data;
}

void BM_DecolePrune(benchmark::State& state) {
  const LabeledDataset& data = DefaultPopulation();
  for (auto _ : state) {
    benchmark::DoNotOptimize(DecolePrune(data, {.seed = 1}));
  }
}
BENCHMARK(BM_DecolePrune)->Unit(benchmark::kMillisecond);

void BM_ClPrune(benchmark::State& state) {
  const LabeledDataset& data = DefaultPopulation();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ClPrune(data, {.seed = 1}));
  }
}
BENCHMARK(BM_ClPrune)->Unit(benchmark::kMillisecond);

void BM_GenerateAndInject(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(InjectNoise(GeneratePopulation(SynthConfig{}),
                                         NoiseSpec::Default(), 5));
  }
}
BENCHMARK(BM_GenerateAndInject)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace decole

#include <benchmark/benchmark.h>

#include "decole/learner.h"
#include "decole/synth.h"

namespace decole {
namespace {

LabeledDataset Population(std::int64_t n) {
  SynthConfig config;
  config.n = n;
  config.seed = 1;
  return InjectNoise(GeneratePopulation(config), NoiseSpec::Default(), 2);
}

void BM_FitLogistic(benchmark::State& state) {
  const LabeledDataset data = Population(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(FitLogistic(data.features, data.observed, {}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitLogistic)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_CrossValProb(benchmark::State& state) {
  const LabeledDataset data = Population(state.range(0));
  const LogisticRegressionLearner learner;
  for (auto _ : state) {
    benchmark::DoNotOptimize(CrossValProb(data.features, data.observed,
                                          learner, {.folds = 5, .seed = 3}));
  }
}
BENCHMARK(BM_CrossValProb)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace decole

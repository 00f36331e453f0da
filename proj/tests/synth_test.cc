#include "decole/synth.h"

#include <cmath>
#include <map>
#include <random>

#include "decole/errors.h"
#include "decole/eval.h"
#include "gtest/gtest.h"

namespace decole {
namespace {

std::map<Cell, std::int64_t> CountCells(const LabeledDataset& d) {
  std::map<Cell, std::int64_t> counts;
  for (std::size_t i = 0; i < d.size(); ++i) {
    ++counts[{d.groups[i], (*d.gold)[i]}];
  }
  return counts;
}

// Independent floor(rate * m): long double holds the exact product of a
// double and an integer below 2^11.
std::int64_t FloorProductOracle(double rate, std::int64_t m) {
  return static_cast<std::int64_t>(
      std::floor(static_cast<long double>(rate) * static_cast<long double>(m)));
}

TEST(GeneratePopulation, DefaultsMatchPublishedSetup) {
  const SynthConfig config;
  EXPECT_EQ(config.n, 10000);
  EXPECT_DOUBLE_EQ(config.sigma, 1.2);
  EXPECT_EQ(config.cluster_means.at({0, 1}), (std::array<double, 2>{2, 3}));
  EXPECT_EQ(config.cluster_means.at({0, 0}), (std::array<double, 2>{7, 4}));
  EXPECT_EQ(config.cluster_means.at({1, 0}), (std::array<double, 2>{6, 3}));
  EXPECT_EQ(config.cluster_means.at({1, 1}), (std::array<double, 2>{5, 7}));

  const LabeledDataset d = GeneratePopulation(config);
  Validate(d);
  EXPECT_EQ(d.size(), 10000u);
  EXPECT_EQ(d.dims(), 2u);
  EXPECT_EQ(d.observed, *d.gold);
  const auto counts = CountCells(d);
  EXPECT_EQ(counts.at({1, 0}) + counts.at({1, 1}), 7000);
  EXPECT_EQ(counts.at({0, 0}), 1500);
  EXPECT_EQ(counts.at({0, 1}), 1500);
  EXPECT_EQ(counts.at({1, 0}), 3500);
}

TEST(GeneratePopulation, SmallestBalancedCase) {
  SynthConfig config;
  config.n = 4;
  config.majority_fraction = 0.5;
  const LabeledDataset d = GeneratePopulation(config);
  const auto counts = CountCells(d);
  for (int g = 0; g < 2; ++g) {
    for (Label c = 0; c < 2; ++c) EXPECT_EQ(counts.at({g, c}), 1);
  }
}

TEST(GeneratePopulation, CellMeansConvergeToConfiguredMeans) {
  SynthConfig config;
  config.n = 100000;
  config.seed = 2024;
  const LabeledDataset d = GeneratePopulation(config);
  std::map<Cell, std::array<double, 3>> sums;
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto& s = sums[{d.groups[i], (*d.gold)[i]}];
    s[0] += d.features(i, 0);
    s[1] += d.features(i, 1);
    s[2] += 1.0;
  }
  for (const auto& [cell, s] : sums) {
    const auto& mean = config.cluster_means.at(cell);
    // Five standard errors of a cell mean.
    const double tolerance = 5.0 * config.sigma / std::sqrt(s[2]);
    EXPECT_NEAR(s[0] / s[2], mean[0], tolerance);
    EXPECT_NEAR(s[1] / s[2], mean[1], tolerance);
  }
}

TEST(GeneratePopulation, DeterministicPerSeed) {
  SynthConfig config;
  config.n = 500;
  config.seed = 9;
  EXPECT_EQ(GeneratePopulation(config), GeneratePopulation(config));
  SynthConfig other = config;
  other.seed = 10;
  EXPECT_NE(GeneratePopulation(config).features,
            GeneratePopulation(other).features);
}

TEST(GeneratePopulation, RejectsInvalidConfig) {
  SynthConfig config;
  config.sigma = 0.0;
  EXPECT_THROW(GeneratePopulation(config), ConfigError);
  config = SynthConfig{};
  config.majority_fraction = 1.5;
  EXPECT_THROW(GeneratePopulation(config), ConfigError);
  config = SynthConfig{};
  config.cluster_means.erase({1, 1});
  EXPECT_THROW(GeneratePopulation(config), ConfigError);
}

TEST(InjectNoise, ZeroAndFullRates) {
  SynthConfig config;
  config.n = 400;
  const LabeledDataset clean = GeneratePopulation(config);
  NoiseSpec zero;
  NoiseSpec full;
  for (int g = 0; g < 2; ++g) {
    for (Label c = 0; c < 2; ++c) {
      zero.rates[{g, c}] = 0.0;
      full.rates[{g, c}] = 1.0;
    }
  }
  EXPECT_EQ(InjectNoise(clean, zero, 1).observed, *clean.gold);
  const LabeledDataset flipped = InjectNoise(clean, full, 1);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    EXPECT_EQ(flipped.observed[i], 1 - (*clean.gold)[i]);
  }
}

TEST(InjectNoise, DefaultRatesGiveExactCountsAndRates) {
  const LabeledDataset clean = GeneratePopulation(SynthConfig{});
  const NoiseSpec spec = NoiseSpec::Default();
  const LabeledDataset noisy = InjectNoise(clean, spec, 77);
  const auto sizes = CountCells(clean);
  std::map<Cell, std::int64_t> flips;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    if (noisy.observed[i] != (*noisy.gold)[i]) {
      ++flips[{noisy.groups[i], (*noisy.gold)[i]}];
    }
  }
  EXPECT_EQ(flips[Cell(0, 1)], 600);  // floor(0.4 * 1500)
  EXPECT_EQ(flips[Cell(0, 0)], 75);   // floor(0.05 * 1500)
  EXPECT_EQ(flips[Cell(1, 0)], 700);  // floor(0.2 * 3500)
  EXPECT_EQ(flips[Cell(1, 1)], 175);  // floor(0.05 * 3500)

  const LabelQuality q = ComputeLabelQuality(noisy);
  EXPECT_EQ(*q.group_fnr[0].rate(), 600.0 / 1500.0);
  EXPECT_EQ(*q.group_fpr[1].rate(), 700.0 / 3500.0);
  for (const auto& [cell, m] : sizes) {
    const double empirical = static_cast<double>(flips[cell]) / m;
    EXPECT_LE(std::abs(empirical - spec.Rate(cell.first, cell.second)),
              1.0 / m);
  }
}

TEST(InjectNoise, OnlyObservedChanges) {
  SynthConfig config;
  config.n = 1000;
  const LabeledDataset clean = GeneratePopulation(config);
  const LabeledDataset noisy = InjectNoise(clean, NoiseSpec::Default(), 5);
  EXPECT_EQ(noisy.features, clean.features);
  EXPECT_EQ(noisy.groups, clean.groups);
  EXPECT_EQ(noisy.gold, clean.gold);
  EXPECT_EQ(noisy.ids, clean.ids);
  EXPECT_EQ(InjectNoise(clean, NoiseSpec::Default(), 5), noisy);
  EXPECT_NE(InjectNoise(clean, NoiseSpec::Default(), 6).observed,
            noisy.observed);
}

TEST(InjectNoise, Errors) {
  SynthConfig config;
  config.n = 20;
  LabeledDataset clean = GeneratePopulation(config);
  NoiseSpec partial = NoiseSpec::Default();
  partial.rates.erase({1, 0});
  EXPECT_THROW(InjectNoise(clean, partial, 1), DataError);
  clean.gold.reset();
  EXPECT_THROW(InjectNoise(clean, NoiseSpec::Default(), 1), DataError);
}

TEST(InjectNoise, BernoulliModeFlipsAtRoughlyTheRate) {
  SynthConfig config;
  config.n = 40000;
  const LabeledDataset clean = GeneratePopulation(config);
  NoiseSpec spec = NoiseSpec::Default();
  spec.mode = NoiseMode::kBernoulli;
  const LabelQuality q = ComputeLabelQuality(InjectNoise(clean, spec, 3));
  EXPECT_NEAR(*q.group_fnr[0].rate(), 0.4, 0.02);
  EXPECT_NEAR(*q.group_fpr[1].rate(), 0.2, 0.02);
}

TEST(FlipCount, MatchesIndependentFloor) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> rate(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> size(0, 2000);
  for (int i = 0; i < 10000; ++i) {
    const double r = rate(gen);
    const std::int64_t m = size(gen);
    ASSERT_EQ(FlipCount(r, m), FloorProductOracle(r, m)) << r << " " << m;
  }
  EXPECT_EQ(FlipCount(0.5, 7), 3);
  EXPECT_EQ(FlipCount(1.0, 7), 7);
  EXPECT_EQ(FlipCount(0.0, 7), 0);
  // The double nearest 0.29 lies below it.
  EXPECT_EQ(FlipCount(0.29, 100), 28);
}

}  // namespace
}  // namespace decole

#ifndef DECOLE_SYNTH_H_
#define DECOLE_SYNTH_H_

#include <array>
#include <cstdint>
#include <map>
#include <utility>

#include "decole/dataset.h"

namespace decole {

// (group, gold class) cell key.
using Cell = std::pair<int, Label>;

// Two-group, two-class population of isotropic 2-D Gaussian clusters. Group 1
// is the majority group.
struct SynthConfig {
  std::int64_t n = 10000;
  double majority_fraction = 0.7;
  double within_group_positive_fraction = 0.5;
  std::map<Cell, std::array<double, 2>> cluster_means = {
      {{0, 1}, {2.0, 3.0}},
      {{0, 0}, {7.0, 4.0}},
      {{1, 0}, {6.0, 3.0}},
      {{1, 1}, {5.0, 7.0}},
  };
  double sigma = 1.2;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
};

enum class NoiseMode { kExactCount, kBernoulli };

// rates[(g, 1)] is P(observed 0 | gold 1, g), the false-negative rate;
// rates[(g, 0)] is P(observed 1 | gold 0, g), the false-positive rate.
struct NoiseSpec {
  std::map<Cell, double> rates;
  NoiseMode mode = NoiseMode::kExactCount;

  double Rate(int group, Label gold_class) const;
  void Validate() const;

  // Group 0 heavy on false negatives, group 1 heavy on false positives.
  static NoiseSpec Default();
};

// gold labels set, observed == gold. Rows are emitted in a seeded random
// order; ids are the decimal row positions.
LabeledDataset GeneratePopulation(const SynthConfig& config);

// Cell sizes for a configuration: group 1 gets round(n * majority_fraction)
// rows and each group round(m * positive_fraction) positives (half away from
// zero).
std::map<Cell, std::int64_t> CellSizes(const SynthConfig& config);

// Exact floor(rate * m) for a double rate in [0, 1].
std::int64_t FlipCount(double rate, std::int64_t m);

// Rewrites `observed` from `gold`. In exact-count mode each (group, gold)
// cell of size m gets FlipCount(rate, m) flips chosen uniformly without
// replacement; in Bernoulli mode each row flips independently.
LabeledDataset InjectNoise(const LabeledDataset& dataset, const NoiseSpec& spec,
                           std::uint64_t seed);

}  // namespace decole

#endif  // DECOLE_SYNTH_H_

#include "decole/synth.h"

#include <cmath>
#include <numeric>
#include <string>

#include "decole/errors.h"
#include "decole/rng.h"

namespace decole {

__extension__ typedef unsigned __int128 Uint128;

namespace {

bool InUnitInterval(double x) { return x >= 0.0 && x <= 1.0; }

std::string CellName(const Cell& cell) {
  return "(group " + std::to_string(cell.first) + ", class " +
         std::to_string(int{cell.second}) + ")";
}

}  // namespace

void SynthConfig::Validate() const {
  if (n < 0) throw ConfigError("n must be non-negative");
  if (!InUnitInterval(majority_fraction)) {
    throw ConfigError("majority_fraction must lie in [0, 1]");
  }
  if (!InUnitInterval(within_group_positive_fraction)) {
    throw ConfigError("within_group_positive_fraction must lie in [0, 1]");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sigma must be positive");
  }
  for (int g = 0; g < 2; ++g) {
    for (Label c = 0; c < 2; ++c) {
      const auto it = cluster_means.find({g, c});
      if (it == cluster_means.end()) {
        throw ConfigError("cluster mean missing for " + CellName({g, c}));
      }
      for (const double v : it->second) {
        if (!std::isfinite(v)) {
          throw ConfigError("non-finite cluster mean for " + CellName({g, c}));
        }
      }
    }
  }
  if (cluster_means.size() != 4) {
    throw ConfigError("cluster means must cover exactly groups {0,1} x {0,1}");
  }
}

double NoiseSpec::Rate(int group, Label gold_class) const {
  const auto it = rates.find({group, gold_class});
  if (it == rates.end()) {
    throw DataError("noise rate missing for " + CellName({group, gold_class}));
  }
  return it->second;
}

void NoiseSpec::Validate() const {
  for (const auto& [cell, rate] : rates) {
    if (cell.first < 0 || cell.second > 1) {
      throw ConfigError("invalid noise cell " + CellName(cell));
    }
    if (!InUnitInterval(rate)) {
      throw ConfigError("noise rate for " + CellName(cell) +
                        " must lie in [0, 1]");
    }
  }
}

NoiseSpec NoiseSpec::Default() {
  NoiseSpec spec;
  spec.rates = {
      {{0, 1}, 0.4},
      {{0, 0}, 0.05},
      {{1, 0}, 0.2},
      {{1, 1}, 0.05},
  };
  return spec;
}

std::map<Cell, std::int64_t> CellSizes(const SynthConfig& config) {
  const auto majority = static_cast<std::int64_t>(
      std::llround(static_cast<double>(config.n) * config.majority_fraction));
  const std::array<std::int64_t, 2> group_sizes = {config.n - majority,
                                                   majority};
  std::map<Cell, std::int64_t> sizes;
  for (int g = 0; g < 2; ++g) {
    const auto positives = static_cast<std::int64_t>(
        std::llround(static_cast<double>(group_sizes[g]) *
                     config.within_group_positive_fraction));
    sizes[{g, 1}] = positives;
    sizes[{g, 0}] = group_sizes[g] - positives;
  }
  return sizes;
}

LabeledDataset GeneratePopulation(const SynthConfig& config) {
  config.Validate();
  const auto sizes = CellSizes(config);
  const auto n = static_cast<std::size_t>(config.n);

  Rng feature_rng(DeriveSeed(config.seed, "synth.features"));
  Matrix features(n, 2);
  std::vector<int> groups;
  std::vector<Label> gold;
  groups.reserve(n);
  gold.reserve(n);
  std::size_t row = 0;
  for (const auto& [cell, count] : sizes) {
    const auto& mean = config.cluster_means.at(cell);
    for (std::int64_t i = 0; i < count; ++i, ++row) {
      features(row, 0) = feature_rng.Normal(mean[0], config.sigma);
      features(row, 1) = feature_rng.Normal(mean[1], config.sigma);
      groups.push_back(cell.first);
      gold.push_back(cell.second);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng order_rng(DeriveSeed(config.seed, "synth.order"));
  order_rng.Shuffle(std::span<std::size_t>(order));

  LabeledDataset out;
  out.features = features.SelectRows(order);
  out.num_groups = 2;
  out.groups.reserve(n);
  out.observed.reserve(n);
  out.ids.reserve(n);
  std::vector<Label> shuffled_gold;
  shuffled_gold.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.groups.push_back(groups[order[i]]);
    out.observed.push_back(gold[order[i]]);
    shuffled_gold.push_back(gold[order[i]]);
    out.ids.push_back(std::to_string(i));
  }
  out.gold = std::move(shuffled_gold);
  return out;
}

std::int64_t FlipCount(double rate, std::int64_t m) {
  if (!InUnitInterval(rate)) throw ConfigError("noise rate outside [0, 1]");
  if (m <= 0 || rate == 0.0) return 0;
  if (rate == 1.0) return m;
  // rate = mantissa * 2^(exponent - 53) with a 53-bit integer mantissa.
  int exponent = 0;
  const double fraction = std::frexp(rate, &exponent);
  const auto mantissa = static_cast<std::uint64_t>(std::ldexp(fraction, 53));
  const Uint128 product =
      static_cast<Uint128>(mantissa) * static_cast<std::uint64_t>(m);
  const int shift = 53 - exponent;
  if (shift >= 128) return 0;
  return static_cast<std::int64_t>(product >> shift);
}

LabeledDataset InjectNoise(const LabeledDataset& dataset, const NoiseSpec& spec,
                           std::uint64_t seed) {
  if (!dataset.gold) {
    throw DataError("noise injection requires gold labels", std::nullopt,
                    "gold");
  }
  spec.Validate();
  const auto& gold = *dataset.gold;

  std::map<Cell, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    cells[{dataset.groups[i], gold[i]}].push_back(i);
  }

  LabeledDataset out = dataset;
  out.observed = gold;
  for (const auto& [cell, rows] : cells) {
    const double rate = spec.Rate(cell.first, cell.second);
    Rng rng(DeriveSeed(seed, "noise",
                       static_cast<std::uint64_t>(cell.first) * 2 +
                           cell.second));
    const Label flipped = 1 - cell.second;
    if (spec.mode == NoiseMode::kExactCount) {
      const auto k = static_cast<std::size_t>(
          FlipCount(rate, static_cast<std::int64_t>(rows.size())));
      for (const std::size_t pick : rng.SampleWithoutReplacement(rows.size(), k)) {
        out.observed[rows[pick]] = flipped;
      }
    } else {
      for (const std::size_t r : rows) {
        if (rng.Uniform01() < rate) out.observed[r] = flipped;
      }
    }
  }
  return out;
}

}  // namespace decole

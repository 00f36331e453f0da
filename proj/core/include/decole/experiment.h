#ifndef DECOLE_EXPERIMENT_H_
#define DECOLE_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "decole/eval.h"
#include "decole/learner.h"
#include "decole/prune.h"
#include "decole/synth.h"

namespace decole {

struct ExperimentConfig {
  SynthConfig synth;
  NoiseSpec noise = NoiseSpec::Default();
  std::vector<PruneMethod> methods = {PruneMethod::kDecole, PruneMethod::kCl,
                                      PruneMethod::kRandom};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  LogisticHyperparams learner;
  int folds = 5;
  GroupFeature group_feature = GroupFeature::kAuto;
  // Random pruning removes as many rows as DeCoLe did on the same seed
  // unless this is off, in which case random_count is used.
  bool match_random_count = true;
  std::size_t random_count = 0;
  std::filesystem::path output_dir;

  // Throws ConfigError.
  void Validate() const;
};

// Every key is optional; absent keys keep their defaults. Unknown keys are
// rejected with ConfigError. Layout:
//   {"synth": {"n", "majority_fraction", "within_group_positive_fraction",
//              "sigma", "seed", "cluster_means": [{"group", "class",
//              "mean": [x, y]}]},
//    "noise": {"mode": "exact"|"bernoulli",
//              "rates": [{"group", "class", "rate"}]},
//    "methods": [...], "seeds": [...],
//    "learner": {"l2_lambda", "max_iterations", "tolerance", "folds",
//                "group_feature": "auto"|"include"|"exclude"},
//    "random": {"match_decole_count", "count"},
//    "output_dir": "..."}
ExperimentConfig ParseExperimentConfig(std::string_view json);
ExperimentConfig ReadExperimentConfig(const std::filesystem::path& path);
// Canonical form of everything except output_dir.
std::string ExperimentConfigJson(const ExperimentConfig& config);
// 16 hex digits of FNV-1a over the canonical JSON.
std::string ConfigFingerprint(const ExperimentConfig& config);

GroupFeature ParseGroupFeature(std::string_view name);

struct MethodOutcome {
  PruneResult result;
  MetricBundle metrics;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  MetricBundle pre_pruning;
  std::map<PruneMethod, MethodOutcome> methods;
};

// Keyed by method name; "pre_pruning" holds label quality before pruning.
struct ExperimentResult {
  std::string fingerprint;
  std::vector<SeedOutcome> seeds;
  std::map<std::string, AggregateReport> aggregates;
};

// Randomness per seed s: population DeriveSeed(s, "population"), noise
// DeriveSeed(s, "noise"), each method DeriveSeed(s, "prune.<method>").
SeedOutcome RunSeed(const ExperimentConfig& config, std::uint64_t seed);

// Pure computation; aggregation needs at least two seeds.
ExperimentResult ComputeExperiment(const ExperimentConfig& config);

// Layout under `dir`:
//   manifest.json                  status "incomplete" until everything else
//                                  is written, then "complete"
//   config.json                    canonical config
//   seed_<s>/<method>.json         per-seed report
//   aggregate.json                 per-method aggregates
//   aggregate.csv, per_seed.csv    flat plotting tables
void WriteExperiment(const ExperimentConfig& config,
                     const ExperimentResult& result,
                     const std::filesystem::path& dir);

// ComputeExperiment then WriteExperiment into config.output_dir. On failure
// the manifest records status "incomplete" and the error, and the exception
// propagates with seed/method/stage context.
ExperimentResult RunExperiment(const ExperimentConfig& config);

std::string SeedReportJson(const ExperimentConfig& config,
                           const SeedOutcome& outcome, PruneMethod method);
std::string AggregateJson(const ExperimentConfig& config,
                          const ExperimentResult& result);

// Rebuilds the aggregates from per-seed report files in `dir`.
std::map<std::string, AggregateReport> AggregateFromSeedReports(
    const std::filesystem::path& dir);
std::map<std::string, AggregateReport> ParseAggregate(std::string_view json);

}  // namespace decole

#endif  // DECOLE_EXPERIMENT_H_

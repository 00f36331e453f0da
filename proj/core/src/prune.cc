#include "decole/prune.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "decole/errors.h"
#include "decole/rng.h"

namespace decole {

const char* MethodName(PruneMethod method) {
  switch (method) {
    case PruneMethod::kDecole:
      return "decole";
    case PruneMethod::kCl:
      return "cl";
    case PruneMethod::kRandom:
      return "random";
  }
  return "decole";
}

PruneMethod ParseMethod(std::string_view name) {
  if (name == "decole") return PruneMethod::kDecole;
  if (name == "cl") return PruneMethod::kCl;
  if (name == "random") return PruneMethod::kRandom;
  throw ConfigError("unknown pruning method '" + std::string(name) +
                    "' (expected decole, cl or random)");
}

std::string Thresholds::ScopeName() const {
  return group ? "g" + std::to_string(*group) : "global";
}

Thresholds ComputeThresholds(std::span<const double> p_hat,
                             std::span<const Label> observed) {
  if (p_hat.size() != observed.size()) {
    throw DataError("probability and label vectors differ in length");
  }
  double sum_pos = 0.0;
  double sum_neg = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  for (std::size_t i = 0; i < p_hat.size(); ++i) {
    if (observed[i] == 1) {
      sum_pos += p_hat[i];
      ++n_pos;
    } else {
      sum_neg += p_hat[i];
      ++n_neg;
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw InsufficientDataError(
        std::string("no observed ") + (n_pos == 0 ? "positives" : "negatives") +
        " in scope; thresholds undefined");
  }
  Thresholds t;
  t.lb = sum_pos / static_cast<double>(n_pos);
  t.ub = sum_neg / static_cast<double>(n_neg);
  return t;
}

std::vector<std::size_t> ApplyPruningRule(std::span<const double> p_hat,
                                          std::span<const Label> observed,
                                          const Thresholds& thresholds) {
  std::vector<std::size_t> pruned;
  for (std::size_t i = 0; i < p_hat.size(); ++i) {
    const bool suspicious_positive = observed[i] == 1 && p_hat[i] < thresholds.ub;
    const bool suspicious_negative = observed[i] == 0 && p_hat[i] > thresholds.lb;
    if (suspicious_positive || suspicious_negative) pruned.push_back(i);
  }
  return pruned;
}

Matrix DesignMatrix(const LabeledDataset& dataset, bool include_group) {
  const std::size_t extra =
      include_group && dataset.num_groups > 1
          ? static_cast<std::size_t>(dataset.num_groups - 1)
          : 0;
  if (extra == 0) return dataset.features;
  const std::size_t d = dataset.dims();
  Matrix out(dataset.size(), d + extra);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto src = dataset.features.Row(i);
    auto dst = out.Row(i);
    std::copy(src.begin(), src.end(), dst.begin());
    if (dataset.groups[i] > 0) {
      dst[d + static_cast<std::size_t>(dataset.groups[i] - 1)] = 1.0;
    }
  }
  return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs the three confident-learning parts over `rows` of the dataset and
// merges the outcome into `result`.
void PruneScope(const LabeledDataset& dataset, const Matrix& design,
                std::span<const std::size_t> rows, std::optional<int> group,
                const PruneConfig& config, const BaseLearner& learner,
                PruneResult& result) {
  const std::string scope = group ? "g" + std::to_string(*group) : "global";
  if (rows.empty()) {
    result.warnings.push_back(scope + ": no rows; scope left unpruned");
    return;
  }
  std::vector<Label> labels;
  labels.reserve(rows.size());
  for (const std::size_t r : rows) labels.push_back(dataset.observed[r]);

  ProbEstimates estimates;
  Thresholds thresholds;
  try {
    estimates = CrossValProb(design.SelectRows(rows), labels, learner,
                             {config.folds, config.seed, config.parallel_folds});
    thresholds = ComputeThresholds(estimates.p_hat, labels);
  } catch (const InsufficientDataError& e) {
    result.warnings.push_back(scope + ": skipped, " + e.what());
    return;
  }
  thresholds.group = group;
  if (thresholds.lb <= thresholds.ub) {
    result.warnings.push_back(
        scope + ": uninformative classifier, lb " + FormatDouble(thresholds.lb) +
        " <= ub " + FormatDouble(thresholds.ub));
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    result.estimates->p_hat[rows[k]] = estimates.p_hat[k];
    result.estimates->fold_assignment[rows[k]] = estimates.fold_assignment[k];
  }
  for (const std::size_t k :
       ApplyPruningRule(estimates.p_hat, labels, thresholds)) {
    result.pruned_rows.push_back(rows[k]);
  }
  result.thresholds.push_back(thresholds);
}

void Finish(const LabeledDataset& dataset, PruneResult& result) {
  std::sort(result.pruned_rows.begin(), result.pruned_rows.end());
  result.pruned_ids.clear();
  result.pruned_ids.reserve(result.pruned_rows.size());
  for (const std::size_t r : result.pruned_rows) {
    result.pruned_ids.push_back(dataset.ids[r]);
  }
}

PruneResult StartResult(const LabeledDataset& dataset, PruneMethod method,
                        std::uint64_t seed) {
  PruneResult result;
  result.method = method;
  result.seed = seed;
  result.estimates.emplace();
  result.estimates->p_hat.assign(dataset.size(), kNaN);
  result.estimates->fold_assignment.assign(dataset.size(), -1);
  return result;
}

}  // namespace

PruneResult DecolePrune(const LabeledDataset& dataset, const PruneConfig& config,
                        const BaseLearner& learner) {
  Validate(dataset);
  PruneResult result = StartResult(dataset, PruneMethod::kDecole, config.seed);
  const Matrix design =
      DesignMatrix(dataset, config.group_feature == GroupFeature::kInclude);
  for (int g = 0; g < dataset.num_groups; ++g) {
    const auto rows = dataset.RowsOfGroup(g);
    PruneScope(dataset, design, rows, g, config, learner, result);
  }
  Finish(dataset, result);
  return result;
}

PruneResult DecolePrune(const LabeledDataset& dataset,
                        const PruneConfig& config) {
  return DecolePrune(dataset, config, LogisticRegressionLearner(config.learner));
}

PruneResult ClPrune(const LabeledDataset& dataset, const PruneConfig& config,
                    const BaseLearner& learner) {
  Validate(dataset);
  PruneResult result = StartResult(dataset, PruneMethod::kCl, config.seed);
  const Matrix design =
      DesignMatrix(dataset, config.group_feature != GroupFeature::kExclude);
  std::vector<std::size_t> rows(dataset.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  PruneScope(dataset, design, rows, std::nullopt, config, learner, result);
  Finish(dataset, result);
  return result;
}

PruneResult ClPrune(const LabeledDataset& dataset, const PruneConfig& config) {
  return ClPrune(dataset, config, LogisticRegressionLearner(config.learner));
}

PruneResult RandomPrune(const LabeledDataset& dataset, std::size_t count,
                        std::uint64_t seed) {
  if (count > dataset.size()) {
    throw DataError("cannot prune " + std::to_string(count) + " of " +
                    std::to_string(dataset.size()) + " rows");
  }
  PruneResult result;
  result.method = PruneMethod::kRandom;
  result.seed = seed;
  Rng rng(DeriveSeed(seed, "random_prune"));
  result.pruned_rows = rng.SampleWithoutReplacement(dataset.size(), count);
  Finish(dataset, result);
  return result;
}

LabeledDataset Retain(const LabeledDataset& dataset, const PruneResult& result) {
  std::unordered_map<std::string_view, std::size_t> row_of;
  row_of.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) row_of[dataset.ids[i]] = i;
  std::vector<bool> drop(dataset.size(), false);
  for (const auto& id : result.pruned_ids) {
    const auto it = row_of.find(id);
    if (it == row_of.end()) {
      throw DataError("pruned id '" + id + "' is not in the dataset");
    }
    drop[it->second] = true;
  }
  std::vector<std::size_t> keep;
  keep.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!drop[i]) keep.push_back(i);
  }
  return dataset.Subset(keep);
}

}  // namespace decole

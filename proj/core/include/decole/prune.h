#ifndef DECOLE_PRUNE_H_
#define DECOLE_PRUNE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decole/dataset.h"
#include "decole/learner.h"

namespace decole {

enum class PruneMethod { kDecole, kCl, kRandom };

const char* MethodName(PruneMethod method);
// Throws ConfigError for anything but "decole", "cl" or "random".
PruneMethod ParseMethod(std::string_view name);

// lb: mean p_hat over observed positives; ub: mean p_hat over observed
// negatives. group is empty for the global (coupled) scope.
struct Thresholds {
  double lb = 0.0;
  double ub = 0.0;
  std::optional<int> group;

  std::string ScopeName() const;
  bool operator==(const Thresholds&) const = default;
};

// Throws InsufficientDataError when either observed class is empty.
Thresholds ComputeThresholds(std::span<const double> p_hat,
                             std::span<const Label> observed);

// Positions i with (observed 1 and p_hat < ub) or (observed 0 and p_hat > lb).
// Ties are kept.
std::vector<std::size_t> ApplyPruningRule(std::span<const double> p_hat,
                                          std::span<const Label> observed,
                                          const Thresholds& thresholds);

// Whether group membership enters the classifier as dummy columns. kAuto
// includes it for the coupled model and leaves it out of the per-group ones.
enum class GroupFeature { kAuto, kInclude, kExclude };

struct PruneConfig {
  LogisticHyperparams learner;
  int folds = 5;
  std::uint64_t seed = 0;
  GroupFeature group_feature = GroupFeature::kAuto;
  bool parallel_folds = false;
};

// Out-of-sample probabilities aligned to dataset rows. Rows in a skipped scope
// hold NaN and fold -1.
struct RowEstimates {
  std::vector<double> p_hat;
  std::vector<int> fold_assignment;
};

struct PruneResult {
  PruneMethod method = PruneMethod::kDecole;
  std::uint64_t seed = 0;
  // Ascending row order.
  std::vector<std::size_t> pruned_rows;
  std::vector<std::string> pruned_ids;
  std::vector<Thresholds> thresholds;
  std::optional<RowEstimates> estimates;
  std::vector<std::string> warnings;
};

// Features plus, when requested and num_groups > 1, one indicator column for
// each group other than group 0.
Matrix DesignMatrix(const LabeledDataset& dataset, bool include_group);

// Per group: cross-validated probabilities from that group's rows only, that
// group's thresholds, that group's pruning; the union is returned. A group
// that cannot be estimated is left unpruned with a warning.
PruneResult DecolePrune(const LabeledDataset& dataset, const PruneConfig& config,
                        const BaseLearner& learner);
PruneResult DecolePrune(const LabeledDataset& dataset,
                        const PruneConfig& config);

// One model, one pair of thresholds, one pruning pass over all rows.
PruneResult ClPrune(const LabeledDataset& dataset, const PruneConfig& config,
                    const BaseLearner& learner);
PruneResult ClPrune(const LabeledDataset& dataset, const PruneConfig& config);

// `count` rows uniformly without replacement. Throws DataError if
// count > n.
PruneResult RandomPrune(const LabeledDataset& dataset, std::size_t count,
                        std::uint64_t seed);

// Rows whose id is not in result.pruned_ids, order preserved. Throws
// DataError on an id the dataset does not contain.
LabeledDataset Retain(const LabeledDataset& dataset, const PruneResult& result);

}  // namespace decole

#endif  // DECOLE_PRUNE_H_

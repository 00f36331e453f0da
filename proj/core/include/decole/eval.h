#ifndef DECOLE_EVAL_H_
#define DECOLE_EVAL_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "decole/dataset.h"
#include "decole/prune.h"

namespace decole {

// Counts behind one recall/precision pair. Ratios with a zero denominator are
// absent.
struct PruneTally {
  std::size_t hits = 0;    // pruned and erroneous
  std::size_t pruned = 0;  // pruned
  std::size_t errors = 0;  // erroneous

  std::optional<double> recall() const;
  std::optional<double> precision() const;
  PruneTally& operator+=(const PruneTally& other);
  bool operator==(const PruneTally&) const = default;
};

// Scopes: overall, per group, and per group restricted to one error type.
// For the false-negative scope of group g, errors are the false negatives of
// g and pruned counts the pruned rows of g with observed label 0 (the only
// rows that can be false negatives); false positives mirror this with
// observed label 1.
struct PruneQuality {
  PruneTally overall;
  std::vector<PruneTally> per_group;
  std::vector<PruneTally> false_negative;
  std::vector<PruneTally> false_positive;
};

// `dataset` is the pre-pruning data the mask was derived from. Throws
// DataError when the mask length or a pruned id does not match it.
PruneQuality ComputePruneQuality(const LabeledDataset& dataset,
                                 const ErrorMask& mask,
                                 const PruneResult& result);

struct RateTally {
  std::size_t wrong = 0;
  std::size_t total = 0;

  std::optional<double> rate() const;
  bool operator==(const RateTally&) const = default;
};

// fpr = #(observed 1, gold 0) / #(gold 0); fnr = #(observed 0, gold 1) /
// #(gold 1).
struct LabelQuality {
  RateTally fpr;
  RateTally fnr;
  std::vector<RateTally> group_fpr;
  std::vector<RateTally> group_fnr;
};

// Throws DataError without gold labels.
LabelQuality ComputeLabelQuality(const LabeledDataset& dataset);

// (metric, scope) -> value, e.g. ("recall", "g0.fn"). Scopes are "overall",
// "g<index>", "g<index>.fn" and "g<index>.fp" with dense group indices.
using MetricKey = std::pair<std::string, std::string>;
using MetricBundle = std::map<MetricKey, std::optional<double>>;

void AppendPruneMetrics(const PruneQuality& quality, MetricBundle& bundle);
void AppendLabelMetrics(const LabelQuality& quality, MetricBundle& bundle);

struct MetricSummary {
  std::optional<double> mean;
  std::optional<double> sd;
  std::optional<double> half_width;
  std::size_t runs = 0;  // runs where the metric was defined
  std::vector<std::optional<double>> values;
};

struct AggregateReport {
  std::size_t run_count = 0;
  std::map<MetricKey, MetricSummary> metrics;
};

// Two-sided 95% Student t critical value t_{0.975, df}.
double StudentT975(int degrees_of_freedom);

// Mean, sample standard deviation and t-based 95% half-width per metric over
// the runs where it is defined. Sums run over sorted values, so the result
// does not depend on run order. Throws DataError for fewer than two runs or
// runs with different metric keys.
AggregateReport Aggregate(std::span<const MetricBundle> runs);

}  // namespace decole

#endif  // DECOLE_EVAL_H_

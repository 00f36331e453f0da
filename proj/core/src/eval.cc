#include "decole/eval.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

#include "decole/errors.h"

namespace decole {

namespace {

std::optional<double> Ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string GroupScope(int group) { return "g" + std::to_string(group); }

}  // namespace

std::optional<double> PruneTally::recall() const {
  return Ratio(hits, errors);
}

std::optional<double> PruneTally::precision() const {
  return Ratio(hits, pruned);
}

PruneTally& PruneTally::operator+=(const PruneTally& other) {
  hits += other.hits;
  pruned += other.pruned;
  errors += other.errors;
  return *this;
}

std::optional<double> RateTally::rate() const { return Ratio(wrong, total); }

PruneQuality ComputePruneQuality(const LabeledDataset& dataset,
                                 const ErrorMask& mask,
                                 const PruneResult& result) {
  const std::size_t n = dataset.size();
  if (mask.size() != n) {
    throw DataError("error mask has " + std::to_string(mask.size()) +
                    " entries for " + std::to_string(n) + " rows");
  }
  std::unordered_map<std::string_view, std::size_t> row_of;
  row_of.reserve(n);
  for (std::size_t i = 0; i < n; ++i) row_of[dataset.ids[i]] = i;
  std::vector<bool> pruned(n, false);
  for (const auto& id : result.pruned_ids) {
    const auto it = row_of.find(id);
    if (it == row_of.end()) {
      throw DataError("pruned id '" + id + "' is not in the evaluated dataset");
    }
    pruned[it->second] = true;
  }

  const auto k = static_cast<std::size_t>(dataset.num_groups);
  PruneQuality q;
  q.per_group.resize(k);
  q.false_negative.resize(k);
  q.false_positive.resize(k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = static_cast<std::size_t>(dataset.groups[i]);
    PruneTally& typed = dataset.observed[i] == 0 ? q.false_negative[g]
                                                 : q.false_positive[g];
    PruneTally row;
    row.pruned = pruned[i] ? 1 : 0;
    row.errors = mask.is_error[i] ? 1 : 0;
    row.hits = row.pruned & row.errors;
    q.per_group[g] += row;
    typed += row;
  }
  for (const auto& t : q.per_group) q.overall += t;
  return q;
}

LabelQuality ComputeLabelQuality(const LabeledDataset& dataset) {
  if (!dataset.gold) {
    throw DataError("label quality requires gold labels", std::nullopt,
                    "gold");
  }
  const auto& gold = *dataset.gold;
  LabelQuality q;
  q.group_fpr.resize(static_cast<std::size_t>(dataset.num_groups));
  q.group_fnr.resize(static_cast<std::size_t>(dataset.num_groups));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto g = static_cast<std::size_t>(dataset.groups[i]);
    RateTally& tally = gold[i] == 0 ? q.group_fpr[g] : q.group_fnr[g];
    ++tally.total;
    if (dataset.observed[i] != gold[i]) ++tally.wrong;
  }
  for (std::size_t g = 0; g < q.group_fpr.size(); ++g) {
    q.fpr.wrong += q.group_fpr[g].wrong;
    q.fpr.total += q.group_fpr[g].total;
    q.fnr.wrong += q.group_fnr[g].wrong;
    q.fnr.total += q.group_fnr[g].total;
  }
  return q;
}

void AppendPruneMetrics(const PruneQuality& quality, MetricBundle& bundle) {
  auto put = [&bundle](const std::string& scope, const PruneTally& t) {
    bundle[{"recall", scope}] = t.recall();
    bundle[{"precision", scope}] = t.precision();
  };
  put("overall", quality.overall);
  for (std::size_t g = 0; g < quality.per_group.size(); ++g) {
    const std::string scope = GroupScope(static_cast<int>(g));
    put(scope, quality.per_group[g]);
    put(scope + ".fn", quality.false_negative[g]);
    put(scope + ".fp", quality.false_positive[g]);
  }
}

void AppendLabelMetrics(const LabelQuality& quality, MetricBundle& bundle) {
  bundle[{"fpr", "overall"}] = quality.fpr.rate();
  bundle[{"fnr", "overall"}] = quality.fnr.rate();
  for (std::size_t g = 0; g < quality.group_fpr.size(); ++g) {
    const std::string scope = GroupScope(static_cast<int>(g));
    bundle[{"fpr", scope}] = quality.group_fpr[g].rate();
    bundle[{"fnr", scope}] = quality.group_fnr[g].rate();
  }
}

double StudentT975(int degrees_of_freedom) {
  if (degrees_of_freedom < 1) {
    throw DataError("t quantile needs at least one degree of freedom");
  }
  const boost::math::students_t dist(degrees_of_freedom);
  return boost::math::quantile(dist, 0.975);
}

AggregateReport Aggregate(std::span<const MetricBundle> runs) {
  if (runs.size() < 2) {
    throw DataError("aggregation needs at least 2 runs, got " +
                    std::to_string(runs.size()));
  }
  for (std::size_t r = 1; r < runs.size(); ++r) {
    const bool same_keys = std::equal(
        runs[r].begin(), runs[r].end(), runs[0].begin(), runs[0].end(),
        [](const auto& a, const auto& b) { return a.first == b.first; });
    if (!same_keys) {
      throw DataError("run " + std::to_string(r) +
                      " reports a different set of metrics than run 0");
    }
  }

  AggregateReport report;
  report.run_count = runs.size();
  for (const auto& [key, _] : runs[0]) {
    MetricSummary summary;
    std::vector<double> present;
    for (const auto& run : runs) {
      const auto& value = run.at(key);
      summary.values.push_back(value);
      if (value) present.push_back(*value);
    }
    std::sort(present.begin(), present.end());
    summary.runs = present.size();
    if (!present.empty()) {
      double sum = 0.0;
      for (const double v : present) sum += v;
      const double mean = present.front() == present.back()
                              ? present.front()
                              : sum / static_cast<double>(present.size());
      summary.mean = mean;
      if (present.size() >= 2) {
        double ss = 0.0;
        for (const double v : present) ss += (v - mean) * (v - mean);
        const double sd =
            std::sqrt(ss / static_cast<double>(present.size() - 1));
        summary.sd = sd;
        summary.half_width =
            StudentT975(static_cast<int>(present.size()) - 1) * sd /
            std::sqrt(static_cast<double>(present.size()));
      }
    }
    report.metrics.emplace(key, std::move(summary));
  }
  return report;
}

}  // namespace decole

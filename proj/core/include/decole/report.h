#ifndef DECOLE_REPORT_H_
#define DECOLE_REPORT_H_

#include <string>
#include <string_view>

#include "decole/eval.h"
#include "decole/prune.h"

namespace decole {

// JSON text for a pruning run: method, seed, per-scope thresholds, pruned
// ids and warnings. Probability estimates are not serialized.
std::string PruneReportJson(const PruneResult& result);

// Inverse of PruneReportJson for the fields it writes. pruned_rows is left
// empty; ids are resolved against a dataset by the consumer. Throws
// DataError on malformed input.
PruneResult ParsePruneReport(std::string_view json);

// {"metric": {"scope": value-or-null}}.
std::string MetricsJson(const MetricBundle& bundle, int indent = 2);
MetricBundle ParseMetrics(std::string_view json);

// metric,scope,value rows, empty value for absent metrics.
std::string MetricsCsv(const MetricBundle& bundle);

}  // namespace decole

#endif  // DECOLE_REPORT_H_

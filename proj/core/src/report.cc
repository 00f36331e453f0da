#include "decole/report.h"

#include "decole/errors.h"
#include "json.hpp"
#include "json_util.h"

namespace decole {

using nlohmann::json;

std::string PruneReportJson(const PruneResult& result) {
  json thresholds = json::array();
  for (const auto& t : result.thresholds) {
    thresholds.push_back({{"scope", t.ScopeName()}, {"lb", t.lb}, {"ub", t.ub}});
  }
  const json report = {
      {"method", MethodName(result.method)},
      {"seed", result.seed},
      {"thresholds", std::move(thresholds)},
      {"pruned_count", result.pruned_ids.size()},
      {"pruned_ids", result.pruned_ids},
      {"warnings", result.warnings},
  };
  return report.dump(2) + "\n";
}

PruneResult ParsePruneReport(std::string_view text) {
  const json report = ParseJsonOrThrow(text, "prune report");
  try {
    PruneResult result;
    result.method = ParseMethod(report.at("method").get<std::string>());
    result.seed = report.at("seed").get<std::uint64_t>();
    for (const auto& t : report.at("thresholds")) {
      Thresholds parsed;
      parsed.lb = t.at("lb").get<double>();
      parsed.ub = t.at("ub").get<double>();
      const auto scope = t.at("scope").get<std::string>();
      if (scope != "global") {
        if (scope.size() < 2 || scope[0] != 'g') {
          throw DataError("bad threshold scope '" + scope + "'");
        }
        parsed.group = std::stoi(scope.substr(1));
      }
      result.thresholds.push_back(parsed);
    }
    result.pruned_ids = report.at("pruned_ids").get<std::vector<std::string>>();
    if (report.contains("warnings")) {
      result.warnings = report.at("warnings").get<std::vector<std::string>>();
    }
    return result;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed prune report: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed prune report: ") + e.what());
  }
}

std::string MetricsJson(const MetricBundle& bundle, int indent) {
  return MetricsToJson(bundle).dump(indent) + "\n";
}

MetricBundle ParseMetrics(std::string_view text) {
  return MetricsFromJson(ParseJsonOrThrow(text, "metrics"));
}

std::string MetricsCsv(const MetricBundle& bundle) {
  std::string out = "metric,scope,value\n";
  for (const auto& [key, value] : bundle) {
    out += key.first + "," + key.second + "," +
           (value ? FormatDouble(*value) : std::string()) + "\n";
  }
  return out;
}

}  // namespace decole

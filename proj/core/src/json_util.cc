#include "json_util.h"

#include "decole/errors.h"

namespace decole {

using nlohmann::json;

json ParseJsonOrThrow(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid ") + what + " JSON: " + e.what());
  }
}

json MetricsToJson(const MetricBundle& bundle) {
  json out = json::object();
  for (const auto& [key, value] : bundle) {
    out[key.first][key.second] = OptionalToJson(value);
  }
  return out;
}

MetricBundle MetricsFromJson(const json& j) {
  MetricBundle bundle;
  try {
    for (const auto& [metric, scopes] : j.items()) {
      for (const auto& [scope, value] : scopes.items()) {
        bundle[{metric, scope}] =
            value.is_null() ? std::nullopt
                            : std::optional<double>(value.get<double>());
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed metrics: ") + e.what());
  }
  return bundle;
}

}  // namespace decole

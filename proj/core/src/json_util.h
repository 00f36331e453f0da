#ifndef DECOLE_SRC_JSON_UTIL_H_
#define DECOLE_SRC_JSON_UTIL_H_

#include <string_view>

#include "decole/eval.h"
#include "json.hpp"

namespace decole {

nlohmann::json ParseJsonOrThrow(std::string_view text, const char* what);

inline nlohmann::json OptionalToJson(const std::optional<double>& value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

nlohmann::json MetricsToJson(const MetricBundle& bundle);
MetricBundle MetricsFromJson(const nlohmann::json& j);

}  // namespace decole

#endif  // DECOLE_SRC_JSON_UTIL_H_

#include "decole/errors.h"

namespace decole {

namespace {

std::string WithLocation(const std::string& message,
                         const std::optional<std::size_t>& row,
                         const std::optional<std::string>& column) {
  std::string out = message;
  if (row.has_value() || column.has_value()) {
    out += " (";
    if (row.has_value()) out += "row " + std::to_string(*row);
    if (row.has_value() && column.has_value()) out += ", ";
    if (column.has_value()) out += "column '" + *column + "'";
    out += ")";
  }
  return out;
}

}  // namespace

DataError::DataError(const std::string& message, std::optional<std::size_t> row,
                     std::optional<std::string> column)
    : std::runtime_error(WithLocation(message, row, column)),
      row_(row),
      column_(std::move(column)) {}

ExitCode ExitCodeOf(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return ExitCode::kUsage;
  if (dynamic_cast<const DataError*>(&e) != nullptr) return ExitCode::kData;
  if (dynamic_cast<const NumericalError*>(&e) != nullptr) {
    return ExitCode::kNumerical;
  }
  return ExitCode::kData;
}

}  // namespace decole

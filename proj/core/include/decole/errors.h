#ifndef DECOLE_ERRORS_H_
#define DECOLE_ERRORS_H_

#include <optional>
#include <stdexcept>
#include <string>

namespace decole {

// Process exit status used by the command-line front end. Library errors map
// onto these through ExitCodeOf().
enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kNumerical = 3,
};

// Invalid user configuration (bad flag values, malformed config file).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data violates a schema or precondition. Row and column are attached
// when the failure can be pinned to a cell.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& message,
                     std::optional<std::size_t> row = std::nullopt,
                     std::optional<std::string> column = std::nullopt);

  const std::optional<std::size_t>& row() const { return row_; }
  const std::optional<std::string>& column() const { return column_; }

 private:
  std::optional<std::size_t> row_;
  std::optional<std::string> column_;
};

// Too few instances of a class (or an empty scope) for the requested
// estimation. Pruning engines catch this to skip a scope with a warning.
class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

// Optimization produced a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExitCode ExitCodeOf(const std::exception& e);

}  // namespace decole

#endif  // DECOLE_ERRORS_H_

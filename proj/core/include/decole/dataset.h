#ifndef DECOLE_DATASET_H_
#define DECOLE_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace decole {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> Row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> Row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> data() const { return data_; }

  // Rows at the given indices, in that order.
  Matrix SelectRows(std::span<const std::size_t> rows) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using Label = std::uint8_t;

// n instances with covariates, a dense group index in [0, num_groups), an
// observed label and, optionally, a gold label.
//
// group_values[g] is the original group code that index g stands for (the
// value written to and read from CSV files). When empty, codes equal indices.
struct LabeledDataset {
  Matrix features;
  std::vector<int> groups;
  std::vector<Label> observed;
  std::optional<std::vector<Label>> gold;
  std::vector<std::string> ids;
  int num_groups = 0;
  std::vector<std::int64_t> group_values;

  std::size_t size() const { return ids.size(); }
  std::size_t dims() const { return features.cols(); }
  bool has_gold() const { return gold.has_value(); }

  std::int64_t GroupValue(int group) const;
  // Row indices of one group, ascending.
  std::vector<std::size_t> RowsOfGroup(int group) const;
  // Same metadata, rows restricted to `rows` in the given order.
  LabeledDataset Subset(std::span<const std::size_t> rows) const;

  bool operator==(const LabeledDataset&) const = default;
};

// Throws DataError naming the offending row for any broken invariant;
// returns the dataset unchanged otherwise.
const LabeledDataset& Validate(const LabeledDataset& dataset);

enum class ErrorType : std::uint8_t { kNone, kFalsePositive, kFalseNegative };

const char* ErrorTypeName(ErrorType type);

struct ErrorMask {
  std::vector<bool> is_error;
  std::vector<ErrorType> error_type;

  std::size_t size() const { return is_error.size(); }
};

// observed vs gold; a false positive is (observed 1, gold 0). Requires gold.
ErrorMask ComputeErrorMask(const LabeledDataset& dataset);

// CSV layout: header `id,f0..f{d-1},group,observed[,gold]`. Columns may
// appear in any order; feature columns are ordered by their index. Feature
// values are written in shortest round-trip form.
LabeledDataset ReadCsv(const std::filesystem::path& path);
LabeledDataset ParseCsv(std::string_view text);
void WriteCsv(const LabeledDataset& dataset, const std::filesystem::path& path);
std::string FormatCsv(const LabeledDataset& dataset);

// Shortest decimal string that parses back to exactly `value`.
std::string FormatDouble(double value);

// Writes to a sibling temporary file and renames it over `path`.
void WriteFileAtomically(const std::filesystem::path& path,
                         std::string_view contents);

}  // namespace decole

#endif  // DECOLE_DATASET_H_

#include "decole/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "decole/errors.h"

namespace decole {

Matrix Matrix::SelectRows(std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = Row(rows[i]);
    std::copy(src.begin(), src.end(), out.Row(i).begin());
  }
  return out;
}

std::int64_t LabeledDataset::GroupValue(int group) const {
  if (group_values.empty()) return group;
  return group_values.at(static_cast<std::size_t>(group));
}

std::vector<std::size_t> LabeledDataset::RowsOfGroup(int group) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i] == group) rows.push_back(i);
  }
  return rows;
}

LabeledDataset LabeledDataset::Subset(std::span<const std::size_t> rows) const {
  LabeledDataset out;
  out.features = features.SelectRows(rows);
  out.num_groups = num_groups;
  out.group_values = group_values;
  out.groups.reserve(rows.size());
  out.observed.reserve(rows.size());
  out.ids.reserve(rows.size());
  if (gold) out.gold.emplace().reserve(rows.size());
  for (const std::size_t r : rows) {
    out.groups.push_back(groups[r]);
    out.observed.push_back(observed[r]);
    out.ids.push_back(ids[r]);
    if (gold) out.gold->push_back((*gold)[r]);
  }
  return out;
}

const LabeledDataset& Validate(const LabeledDataset& dataset) {
  const std::size_t n = dataset.features.rows();
  auto check_length = [n](std::size_t len, const char* what) {
    if (len != n) {
      throw DataError(std::string("length mismatch: ") + what + " has " +
                      std::to_string(len) + " entries, features have " +
                      std::to_string(n) + " rows");
    }
  };
  check_length(dataset.groups.size(), "groups");
  check_length(dataset.observed.size(), "observed");
  check_length(dataset.ids.size(), "ids");
  if (dataset.gold) check_length(dataset.gold->size(), "gold");
  if (dataset.num_groups < 0) throw DataError("negative group count");
  if (!dataset.group_values.empty() &&
      dataset.group_values.size() !=
          static_cast<std::size_t>(dataset.num_groups)) {
    throw DataError("group value map size differs from the group count");
  }

  std::unordered_set<std::string_view> seen;
  seen.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (dataset.groups[i] < 0 || dataset.groups[i] >= dataset.num_groups) {
      throw DataError("group index " + std::to_string(dataset.groups[i]) +
                          " outside [0, " +
                          std::to_string(dataset.num_groups) + ")",
                      i, "group");
    }
    if (dataset.observed[i] > 1) {
      throw DataError("non-binary label " +
                          std::to_string(int{dataset.observed[i]}),
                      i, "observed");
    }
    if (dataset.gold && (*dataset.gold)[i] > 1) {
      throw DataError("non-binary label " +
                          std::to_string(int{(*dataset.gold)[i]}),
                      i, "gold");
    }
    const auto row = dataset.features.Row(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!std::isfinite(row[c])) {
        throw DataError("non-finite feature value", i,
                        "f" + std::to_string(c));
      }
    }
    if (!seen.insert(dataset.ids[i]).second) {
      throw DataError("duplicate id '" + dataset.ids[i] + "'", i, "id");
    }
  }
  return dataset;
}

const char* ErrorTypeName(ErrorType type) {
  switch (type) {
    case ErrorType::kNone:
      return "none";
    case ErrorType::kFalsePositive:
      return "false_positive";
    case ErrorType::kFalseNegative:
      return "false_negative";
  }
  return "none";
}

ErrorMask ComputeErrorMask(const LabeledDataset& dataset) {
  if (!dataset.gold) {
    throw DataError("error mask requires gold labels", std::nullopt, "gold");
  }
  const auto& gold = *dataset.gold;
  ErrorMask mask;
  mask.is_error.resize(dataset.size());
  mask.error_type.resize(dataset.size(), ErrorType::kNone);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.observed[i] == gold[i]) continue;
    mask.is_error[i] = true;
    mask.error_type[i] = dataset.observed[i] == 1 ? ErrorType::kFalsePositive
                                                  : ErrorType::kFalseNegative;
  }
  return mask;
}

std::string FormatDouble(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

std::vector<std::string_view> SplitLine(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

Label ParseLabel(std::string_view cell, std::size_t row,
                 const std::string& column) {
  if (cell == "0") return 0;
  if (cell == "1") return 1;
  throw DataError("expected 0 or 1, got '" + std::string(cell) + "'", row,
                  column);
}

double ParseFeature(std::string_view cell, std::size_t row,
                    const std::string& column) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    throw DataError("unparseable number '" + std::string(cell) + "'", row,
                    column);
  }
  if (!std::isfinite(value)) {
    throw DataError("non-finite feature value", row, column);
  }
  return value;
}

std::int64_t ParseGroupCode(std::string_view cell, std::size_t row) {
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() ||
      value < 0) {
    throw DataError("expected a non-negative integer group, got '" +
                        std::string(cell) + "'",
                    row, "group");
  }
  return value;
}

}  // namespace

LabeledDataset ParseCsv(std::string_view text) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      start = end + 1;
    }
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw DataError("missing header row");

  const auto header = SplitLine(lines.front());
  std::map<std::string, std::size_t, std::less<>> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!column_of.emplace(std::string(header[c]), c).second) {
      throw DataError("duplicate column", std::nullopt, std::string(header[c]));
    }
  }
  auto require = [&](const std::string& name) {
    const auto it = column_of.find(name);
    if (it == column_of.end()) {
      throw DataError("missing required column", std::nullopt, name);
    }
    return it->second;
  };
  const std::size_t id_col = require("id");
  const std::size_t group_col = require("group");
  const std::size_t observed_col = require("observed");
  std::optional<std::size_t> gold_col;
  if (const auto it = column_of.find("gold"); it != column_of.end()) {
    gold_col = it->second;
  }
  std::vector<std::size_t> feature_cols;
  for (std::size_t f = 0;; ++f) {
    const auto it = column_of.find("f" + std::to_string(f));
    if (it == column_of.end()) break;
    feature_cols.push_back(it->second);
  }
  if (feature_cols.empty()) require("f0");
  // A gap such as f0,f2 means f1 is missing.
  for (const auto& [name, _] : column_of) {
    if (name.size() > 1 && name[0] == 'f' &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char ch) { return ch >= '0' && ch <= '9'; })) {
      if (std::stoull(name.substr(1)) >= feature_cols.size()) {
        require("f" + std::to_string(feature_cols.size()));
      }
    }
  }

  const std::size_t n = lines.size() - 1;
  const std::size_t d = feature_cols.size();
  LabeledDataset out;
  out.features = Matrix(n, d);
  out.ids.reserve(n);
  out.observed.reserve(n);
  if (gold_col) out.gold.emplace().reserve(n);
  std::vector<std::int64_t> codes;
  codes.reserve(n);
  std::unordered_set<std::string_view> seen;
  for (std::size_t r = 0; r < n; ++r) {
    const auto cells = SplitLine(lines[r + 1]);
    if (cells.size() != header.size()) {
      throw DataError("expected " + std::to_string(header.size()) +
                          " cells, got " + std::to_string(cells.size()),
                      r);
    }
    if (cells[id_col].empty()) throw DataError("empty id", r, "id");
    if (!seen.insert(cells[id_col]).second) {
      throw DataError("duplicate id '" + std::string(cells[id_col]) + "'", r,
                      "id");
    }
    out.ids.emplace_back(cells[id_col]);
    for (std::size_t f = 0; f < d; ++f) {
      out.features(r, f) =
          ParseFeature(cells[feature_cols[f]], r, "f" + std::to_string(f));
    }
    codes.push_back(ParseGroupCode(cells[group_col], r));
    out.observed.push_back(ParseLabel(cells[observed_col], r, "observed"));
    if (gold_col) out.gold->push_back(ParseLabel(cells[*gold_col], r, "gold"));
  }

  std::vector<std::int64_t> distinct = codes;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  out.num_groups = static_cast<int>(distinct.size());
  out.groups.reserve(n);
  for (const std::int64_t code : codes) {
    out.groups.push_back(static_cast<int>(
        std::lower_bound(distinct.begin(), distinct.end(), code) -
        distinct.begin()));
  }
  bool identity = true;
  for (std::size_t g = 0; g < distinct.size(); ++g) {
    identity = identity && distinct[g] == static_cast<std::int64_t>(g);
  }
  if (!identity) out.group_values = std::move(distinct);
  return out;
}

LabeledDataset ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str());
}

std::string FormatCsv(const LabeledDataset& dataset) {
  std::string out = "id";
  for (std::size_t f = 0; f < dataset.dims(); ++f) {
    out += ",f" + std::to_string(f);
  }
  out += ",group,observed";
  if (dataset.gold) out += ",gold";
  out += '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out += dataset.ids[i];
    for (const double v : dataset.features.Row(i)) {
      out += ',';
      out += FormatDouble(v);
    }
    out += ',';
    out += std::to_string(dataset.GroupValue(dataset.groups[i]));
    out += dataset.observed[i] ? ",1" : ",0";
    if (dataset.gold) out += (*dataset.gold)[i] ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

void WriteCsv(const LabeledDataset& dataset,
              const std::filesystem::path& path) {
  WriteFileAtomically(path, FormatCsv(dataset));
}

void WriteFileAtomically(const std::filesystem::path& path,
                         std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace decole

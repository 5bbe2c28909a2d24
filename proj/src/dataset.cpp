#include "isodist/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

namespace isodist {

const char* to_string(ColumnKind kind) noexcept {
  return kind == ColumnKind::numeric ? "numeric" : "categorical";
}

ColumnKind column_kind_from_string(const std::string& name) {
  if (name == "numeric") return ColumnKind::numeric;
  if (name == "categorical") return ColumnKind::categorical;
  throw std::invalid_argument("unknown column kind '" + name + "'");
}

Column Column::numeric(std::string name, std::vector<double> values,
                       std::vector<std::uint8_t> missing) {
  if (values.size() != missing.size()) {
    throw std::invalid_argument("column '" + name + "': values and missing mask differ in length");
  }
  Column col;
  col.name_ = std::move(name);
  col.kind_ = ColumnKind::numeric;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (missing[i]) {
      missing[i] = 1;
      values[i] = std::numeric_limits<double>::quiet_NaN();
    } else if (!std::isfinite(values[i])) {
      throw std::invalid_argument("column '" + col.name_ + "': non-finite value not marked missing");
    }
  }
  col.values_ = std::move(values);
  col.missing_ = std::move(missing);
  return col;
}

Column Column::numeric(std::string name, std::vector<double> values) {
  std::vector<std::uint8_t> missing(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) missing[i] = std::isnan(values[i]) ? 1 : 0;
  return numeric(std::move(name), std::move(values), std::move(missing));
}

Column Column::categorical(std::string name, std::vector<std::int32_t> codes,
                           std::vector<std::uint8_t> missing, std::vector<std::string> labels) {
  if (codes.size() != missing.size()) {
    throw std::invalid_argument("column '" + name + "': codes and missing mask differ in length");
  }
  Column col;
  col.name_ = std::move(name);
  col.kind_ = ColumnKind::categorical;
  const auto n_labels = static_cast<std::int64_t>(labels.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (missing[i]) {
      missing[i] = 1;
      codes[i] = kMissingCode;
    } else if (codes[i] < 0 || codes[i] >= n_labels) {
      throw std::invalid_argument("column '" + col.name_ + "': category code out of range");
    }
  }
  col.codes_ = std::move(codes);
  col.missing_ = std::move(missing);
  col.labels_ = std::move(labels);
  return col;
}

Column Column::categorical(std::string name, std::vector<std::int32_t> codes,
                           std::vector<std::string> labels) {
  std::vector<std::uint8_t> missing(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) missing[i] = codes[i] == kMissingCode ? 1 : 0;
  return categorical(std::move(name), std::move(codes), std::move(missing), std::move(labels));
}

std::size_t Column::n_missing() const noexcept {
  return static_cast<std::size_t>(std::count(missing_.begin(), missing_.end(), std::uint8_t{1}));
}

Column Column::select_rows(std::span<const std::size_t> rows) const {
  Column out;
  out.name_ = name_;
  out.kind_ = kind_;
  out.labels_ = labels_;
  out.missing_.reserve(rows.size());
  for (auto r : rows) out.missing_.push_back(missing_.at(r));
  if (kind_ == ColumnKind::numeric) {
    out.values_.reserve(rows.size());
    for (auto r : rows) out.values_.push_back(values_[r]);
  } else {
    out.codes_.reserve(rows.size());
    for (auto r : rows) out.codes_.push_back(codes_[r]);
  }
  return out;
}

Dataset::Dataset(std::vector<Column> columns)
    : Dataset(columns, std::vector<double>(columns.empty() ? 0 : columns.front().size(), 1.0)) {}

Dataset::Dataset(std::vector<Column> columns, std::vector<double> row_weights)
    : columns_(std::move(columns)), weights_(std::move(row_weights)) {
  if (columns_.empty()) throw std::invalid_argument("dataset needs at least one column");
  for (const auto& col : columns_) {
    if (col.size() != weights_.size()) {
      throw std::invalid_argument("column '" + col.name() + "' length differs from row count");
    }
  }
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("row weights must be positive and finite");
    }
  }
}

bool Dataset::rows_identical(std::size_t a, std::size_t b) const noexcept {
  for (const auto& col : columns_) {
    if (col.is_missing(a) != col.is_missing(b)) return false;
    if (col.is_missing(a)) continue;
    if (col.is_numeric()) {
      if (std::bit_cast<std::uint64_t>(col.value(a)) != std::bit_cast<std::uint64_t>(col.value(b))) {
        return false;
      }
    } else if (col.code(a) != col.code(b)) {
      return false;
    }
  }
  return true;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const auto& col : columns_) cols.push_back(col.select_rows(rows));
  std::vector<double> weights;
  weights.reserve(rows.size());
  for (auto r : rows) weights.push_back(weights_.at(r));
  return Dataset(std::move(cols), std::move(weights));
}

double median_inplace(std::span<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + (upper - lower) / 2.0;
}

ColumnStats column_stats(const Column& col, std::span<const std::size_t> subset) {
  if (subset.empty()) throw std::invalid_argument("column_stats: empty subset");
  std::vector<double> present;
  present.reserve(subset.size());
  for (auto r : subset) {
    if (col.is_missing(r)) continue;
    present.push_back(col.is_numeric() ? col.value(r) : static_cast<double>(col.code(r)));
  }
  ColumnStats stats;
  stats.n_present = present.size();
  if (present.empty()) return stats;

  const auto [lo, hi] = std::minmax_element(present.begin(), present.end());
  stats.min = *lo;
  stats.max = *hi;
  const double count = static_cast<double>(present.size());
  stats.mean = std::accumulate(present.begin(), present.end(), 0.0) / count;
  double ss = 0.0;
  for (double v : present) ss += (v - stats.mean) * (v - stats.mean);
  stats.std = std::sqrt(ss / count);
  stats.median = median_inplace(present);
  return stats;
}

namespace {

// Byte key of a row: per column a missing flag followed by the raw bits.
std::string row_key(const Dataset& ds, std::size_t row) {
  std::string key;
  key.reserve(ds.n_cols() * 9);
  for (const auto& col : ds.columns()) {
    if (col.is_missing(row)) {
      key.push_back('\0');
      continue;
    }
    key.push_back('\1');
    char buf[8];
    if (col.is_numeric()) {
      const double v = col.value(row);
      std::memcpy(buf, &v, 8);
    } else {
      const std::int64_t c = col.code(row);
      std::memcpy(buf, &c, 8);
    }
    key.append(buf, 8);
  }
  return key;
}

}  // namespace

Deduplicated deduplicate(const Dataset& ds) {
  std::unordered_map<std::string, std::size_t> first_seen;
  first_seen.reserve(ds.n_rows());
  std::vector<std::size_t> representatives;
  std::vector<double> weights;
  std::vector<std::size_t> group_map(ds.n_rows());
  const auto in_weights = ds.row_weights();

  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    auto [it, inserted] = first_seen.try_emplace(row_key(ds, i), representatives.size());
    if (inserted) {
      representatives.push_back(i);
      weights.push_back(in_weights[i]);
    } else {
      weights[it->second] += in_weights[i];
    }
    group_map[i] = it->second;
  }

  if (representatives.size() == ds.n_rows()) {
    return {ds, std::move(group_map)};
  }
  Dataset reduced = ds.select_rows(representatives);
  return {Dataset(std::vector<Column>(reduced.columns().begin(), reduced.columns().end()),
                  std::move(weights)),
          std::move(group_map)};
}

}  // namespace isodist

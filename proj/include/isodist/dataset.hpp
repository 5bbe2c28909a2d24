#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace isodist {

enum class ColumnKind { numeric, categorical };

const char* to_string(ColumnKind kind) noexcept;
ColumnKind column_kind_from_string(const std::string& name);

inline constexpr std::int32_t kMissingCode = -1;

// One column of a table. Numeric columns hold reals (NaN in missing slots),
// categorical columns hold dense codes into `labels()` (kMissingCode in
// missing slots). The missing mask is authoritative for both.
class Column {
 public:
  static Column numeric(std::string name, std::vector<double> values,
                        std::vector<std::uint8_t> missing);
  // Convenience: NaN entries become missing.
  static Column numeric(std::string name, std::vector<double> values);

  static Column categorical(std::string name, std::vector<std::int32_t> codes,
                            std::vector<std::uint8_t> missing,
                            std::vector<std::string> labels);
  // Convenience: codes equal to kMissingCode become missing.
  static Column categorical(std::string name, std::vector<std::int32_t> codes,
                            std::vector<std::string> labels);

  const std::string& name() const noexcept { return name_; }
  ColumnKind kind() const noexcept { return kind_; }
  bool is_numeric() const noexcept { return kind_ == ColumnKind::numeric; }
  std::size_t size() const noexcept { return missing_.size(); }

  bool is_missing(std::size_t row) const noexcept { return missing_[row] != 0; }
  double value(std::size_t row) const noexcept { return values_[row]; }
  std::int32_t code(std::size_t row) const noexcept { return codes_[row]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const std::int32_t> codes() const noexcept { return codes_; }
  std::span<const std::uint8_t> missing_mask() const noexcept { return missing_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t n_categories() const noexcept { return labels_.size(); }

  std::size_t n_missing() const noexcept;

  Column select_rows(std::span<const std::size_t> rows) const;

 private:
  Column() = default;

  std::string name_;
  ColumnKind kind_ = ColumnKind::numeric;
  std::vector<double> values_;
  std::vector<std::int32_t> codes_;
  std::vector<std::uint8_t> missing_;
  std::vector<std::string> labels_;
};

// Columnar table with per-row positive weights. Weights act as sampling
// multiplicities (a collapsed duplicate carries the sum of its members).
class Dataset {
 public:
  explicit Dataset(std::vector<Column> columns);
  Dataset(std::vector<Column> columns, std::vector<double> row_weights);

  std::size_t n_rows() const noexcept { return weights_.size(); }
  std::size_t n_cols() const noexcept { return columns_.size(); }

  const Column& column(std::size_t j) const { return columns_.at(j); }
  std::span<const Column> columns() const noexcept { return columns_; }
  std::span<const double> row_weights() const noexcept { return weights_; }

  // True when every cell matches bitwise and missing matches missing.
  bool rows_identical(std::size_t a, std::size_t b) const noexcept;

  Dataset select_rows(std::span<const std::size_t> rows) const;

 private:
  std::vector<Column> columns_;
  std::vector<double> weights_;
};

struct ColumnStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double median = 0.0;
  std::size_t n_present = 0;
};

// Statistics over the non-missing entries among `subset`. For categorical
// columns the statistics are taken over the integer codes. When every entry
// is missing the result has n_present == 0 and zeroed fields.
ColumnStats column_stats(const Column& col, std::span<const std::size_t> subset);

// Median of a scratch buffer; reorders it. Even counts average the two middle
// order statistics.
double median_inplace(std::span<double> values);

struct Deduplicated {
  Dataset data;
  // group_map[i] is the row of `data` that stands for original row i.
  std::vector<std::size_t> group_map;

  bool had_duplicates() const noexcept { return data.n_rows() != group_map.size(); }
};

// Collapses exact duplicates onto their first occurrence; the survivor's
// weight is the sum of its members' weights.
Deduplicated deduplicate(const Dataset& ds);

}  // namespace isodist

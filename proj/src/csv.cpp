#include "isodist/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "isodist/errors.hpp"

namespace isodist {
namespace {

using Record = std::vector<std::string>;

// Splits the whole text into records, skipping blank lines. Error row indices
// count records, not physical lines.
std::vector<Record> split_records(const std::string& text, char delim) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool after_quote = false;
  bool record_has_content = false;

  auto end_field = [&] {
    current.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
    after_quote = false;
  };
  auto end_record = [&] {
    if (record_has_content || !current.empty()) {
      end_field();
      records.push_back(std::move(current));
    }
    current.clear();
    field.clear();
    field_was_quoted = false;
    after_quote = false;
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    if (c == '\n' || c == '\r') {
      end_record();
      continue;
    }
    if (c == delim) {
      end_field();
      record_has_content = true;
      continue;
    }
    if (after_quote) {
      throw ParseError(records.size(), "unexpected character after closing quote");
    }
    if (c == '"') {
      if (!field.empty() || field_was_quoted) {
        throw ParseError(records.size(), "quote inside unquoted field");
      }
      in_quotes = true;
      field_was_quoted = true;
      record_has_content = true;
      continue;
    }
    field.push_back(c);
    record_has_content = true;
  }
  if (in_quotes) throw ParseError(records.size(), "unterminated quoted field");
  end_record();
  return records;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

bool needs_quotes(const std::string& s, char delim) {
  return s.find_first_of(std::string{delim, '"', '\n', '\r'}) != std::string::npos ||
         (!s.empty() && (s.front() == ' ' || s.back() == ' '));
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Dataset read_csv(std::istream& in, const CsvOptions& options) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  auto records = split_records(text, options.delimiter);
  if (records.empty()) throw std::invalid_argument("CSV input is empty");

  const std::size_t n_cols = records.front().size();
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r].size() != n_cols) {
      throw ParseError(r, "expected " + std::to_string(n_cols) + " fields, found " +
                              std::to_string(records[r].size()));
    }
  }

  std::vector<std::string> names;
  std::size_t first_data = 0;
  if (options.has_header) {
    names = records.front();
    first_data = 1;
  } else {
    for (std::size_t j = 0; j < n_cols; ++j) names.push_back("V" + std::to_string(j + 1));
  }
  const std::size_t n_rows = records.size() - first_data;
  if (n_rows == 0) throw std::invalid_argument("CSV input has no data rows");
  if (!options.kinds.empty() && options.kinds.size() != n_cols) {
    throw std::invalid_argument("column kind hints do not match the number of columns");
  }

  auto is_missing = [&](const std::string& cell) {
    return cell.empty() || cell == options.missing_token;
  };

  std::vector<Column> columns;
  columns.reserve(n_cols);
  for (std::size_t j = 0; j < n_cols; ++j) {
    std::optional<ColumnKind> kind;
    if (!options.kinds.empty()) {
      kind = options.kinds[j];
    } else if (auto it = options.schema.find(names[j]); it != options.schema.end()) {
      kind = it->second;
    }

    std::vector<std::uint8_t> missing(n_rows, 0);
    std::vector<double> reals(n_rows, std::numeric_limits<double>::quiet_NaN());
    bool all_numeric = true;
    for (std::size_t i = 0; i < n_rows; ++i) {
      const auto& cell = records[first_data + i][j];
      if (is_missing(cell)) {
        missing[i] = 1;
        continue;
      }
      if (kind == ColumnKind::categorical || !all_numeric) continue;
      if (auto v = parse_real(cell)) {
        reals[i] = *v;
      } else if (kind == ColumnKind::numeric) {
        throw ParseError(first_data + i, "column '" + names[j] + "': '" + cell + "' is not a number");
      } else {
        all_numeric = false;
      }
    }

    if (kind.value_or(all_numeric ? ColumnKind::numeric : ColumnKind::categorical) ==
        ColumnKind::numeric) {
      columns.push_back(Column::numeric(names[j], std::move(reals), std::move(missing)));
      continue;
    }

    std::vector<std::int32_t> codes(n_rows, kMissingCode);
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::int32_t> code_of;
    for (std::size_t i = 0; i < n_rows; ++i) {
      if (missing[i]) continue;
      const auto& cell = records[first_data + i][j];
      auto [it, inserted] = code_of.try_emplace(cell, static_cast<std::int32_t>(labels.size()));
      if (inserted) labels.push_back(cell);
      codes[i] = it->second;
    }
    columns.push_back(
        Column::categorical(names[j], std::move(codes), std::move(missing), std::move(labels)));
  }
  return Dataset(std::move(columns));
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_csv(in, options);
}

void write_csv(const Dataset& ds, std::ostream& out, const CsvOptions& options) {
  const char delim = options.delimiter;
  auto emit = [&](const std::string& s) { out << (needs_quotes(s, delim) ? quote(s) : s); };

  if (options.has_header) {
    for (std::size_t j = 0; j < ds.n_cols(); ++j) {
      if (j) out << delim;
      emit(ds.column(j).name());
    }
    out << '\n';
  }
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    for (std::size_t j = 0; j < ds.n_cols(); ++j) {
      if (j) out << delim;
      const auto& col = ds.column(j);
      if (col.is_missing(i)) {
        // A lone empty field would read back as a skipped blank line.
        if (options.missing_token.empty() && ds.n_cols() == 1) {
          out << "\"\"";
        } else {
          emit(options.missing_token);
        }
      } else if (col.is_numeric()) {
        out << format_real(col.value(i));
      } else {
        emit(col.labels()[static_cast<std::size_t>(col.code(i))]);
      }
    }
    out << '\n';
  }
}

std::map<std::string, ColumnKind> load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schema '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("schema '" + path.string() + "': " + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("schema must be a JSON object");
  std::map<std::string, ColumnKind> schema;
  for (const auto& [name, kind] : doc.items()) {
    if (!kind.is_string()) throw std::invalid_argument("schema entry '" + name + "' is not a string");
    schema.emplace(name, column_kind_from_string(kind.get<std::string>()));
  }
  return schema;
}

}  // namespace isodist

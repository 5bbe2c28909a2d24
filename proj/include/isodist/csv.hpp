#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "isodist/dataset.hpp"

namespace isodist {

struct CsvOptions {
  bool has_header = true;
  // Cells equal to this token (or empty) are missing.
  std::string missing_token = "NA";
  char delimiter = ',';
  // Column kinds by position. When empty, `schema` and then auto-detection
  // decide: a column is numeric iff every non-missing cell parses as a finite
  // real.
  std::vector<ColumnKind> kinds;
  // Column kinds by header name.
  std::map<std::string, ColumnKind> schema;
};

// RFC-4180 style reader: quoted fields may contain delimiters, newlines and
// doubled quotes. Blank lines are skipped. Throws ParseError on malformed
// records and std::invalid_argument on empty input.
Dataset read_csv(std::istream& in, const CsvOptions& options = {});
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

// Writes values at full round-trip precision; missing cells as the missing
// token. Row weights are not written.
void write_csv(const Dataset& ds, std::ostream& out, const CsvOptions& options = {});

// Schema sidecar: a JSON object mapping column name to "numeric" or
// "categorical".
std::map<std::string, ColumnKind> load_schema(const std::filesystem::path& path);

}  // namespace isodist

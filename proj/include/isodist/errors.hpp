#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isodist {

// Malformed CSV content. `row()` is the 0-based record index in the file
// (the header, when present, is record 0).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : std::runtime_error("row " + std::to_string(row) + ": " + what),
        row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// Prediction data does not match the column layout a model was fitted on.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The data admits no split at all, or is too small to fit on.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model file is truncated, malformed, or written by an unknown format version.
class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace isodist

#include "isodist/matrix_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace isodist {
namespace {

void put_u64_le(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xFF);
  out.write(bytes, 8);
}

std::uint64_t get_u64_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw std::runtime_error("binary matrix: unexpected end of input");
  }
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return v;
}

std::string format_cell(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_cell(const std::string& s) {
  if (s == "NA") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("matrix CSV: bad cell '" + s + "'");
  }
  return v;
}

}  // namespace

void write_matrix_binary(const CondensedMatrix& m, std::ostream& out) {
  out.write(kBinaryMatrixMagic.data(), kBinaryMatrixMagic.size());
  put_u64_le(out, m.size());
  for (double v : m.cells()) put_u64_le(out, std::bit_cast<std::uint64_t>(v));
}

CondensedMatrix read_matrix_binary(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kBinaryMatrixMagic) {
    throw std::runtime_error("binary matrix: bad magic bytes");
  }
  const std::uint64_t n = get_u64_le(in);
  const std::uint64_t count = n < 2 ? 0 : n * (n - 1) / 2;
  std::vector<double> cells;
  cells.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) cells.push_back(std::bit_cast<double>(get_u64_le(in)));
  return CondensedMatrix(n, std::move(cells));
}

void write_matrix_csv(const CondensedMatrix& m, std::ostream& out) {
  const std::size_t n = m.size();
  for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << j;
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ',';
      out << format_cell(m(i, j));
    }
    out << '\n';
  }
}

CondensedMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("matrix CSV: empty input");
  const std::size_t n = line.empty() ? 0 : static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  CondensedMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("matrix CSV: missing rows");
    std::stringstream row(line);
    std::string cell;
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("matrix CSV: short row");
      if (j > i) m.at(i, j) = parse_cell(cell);
    }
  }
  return m;
}

}  // namespace isodist

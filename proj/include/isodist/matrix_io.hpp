#pragma once

#include <array>
#include <iosfwd>

#include "isodist/condensed_matrix.hpp"

namespace isodist {

// "ISODIST1", little-endian u64 n, then the n(n-1)/2 condensed cells as
// little-endian IEEE-754 doubles.
inline constexpr std::array<char, 8> kBinaryMatrixMagic{'I', 'S', 'O', 'D', 'I', 'S', 'T', '1'};

void write_matrix_binary(const CondensedMatrix& m, std::ostream& out);
CondensedMatrix read_matrix_binary(std::istream& in);

// Full square matrix. The header row names the columns 0..n-1; NaN cells are
// written as NA. Values use shortest round-trip formatting.
void write_matrix_csv(const CondensedMatrix& m, std::ostream& out);
CondensedMatrix read_matrix_csv(std::istream& in);

}  // namespace isodist

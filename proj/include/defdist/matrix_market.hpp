#pragma once

#include <iosfwd>
#include <string>

#include "defdist/complex_matrix.hpp"

namespace defdist::mm {

/// Reads `%%MatrixMarket matrix coordinate|array complex|real|integer general`.
/// Coordinate indices are 1-based, unlisted entries are zero, array data is
/// column-major per the format definition. Real/integer fields are promoted
/// to complex with zero imaginary part. Throws ParseError (with the line
/// number) on malformed input and UnsupportedFormatError for pattern fields
/// or non-general symmetry.
ComplexMatrix read_matrix_market(std::istream& in);
ComplexMatrix read_matrix_market(const std::string& path);

/// Writes coordinate complex general with 17 significant digits per part;
/// a write/read round trip reproduces the matrix bitwise.
void write_matrix_market(std::ostream& out, const ComplexMatrix& A);
void write_matrix_market(const std::string& path, const ComplexMatrix& A);

}  // namespace defdist::mm

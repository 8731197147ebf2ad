#pragma once

#include <filesystem>
#include <iosfwd>

#include "seldet/sparse.hpp"

namespace seldet {

// Coordinate Matrix Market, `symmetric` only. Field `real`, `integer` or
// `pattern` (pattern entries read as 1.0). Either triangle is accepted.
SparseSymmetric read_matrix_market(std::istream& in);
SparseSymmetric read_matrix_market(const std::filesystem::path& path);

// Writes the lower triangle, 1-based, 17 significant digits.
void write_matrix_market(const SparseSymmetric& a, std::ostream& out);
void write_matrix_market(const SparseSymmetric& a, const std::filesystem::path& path);

}  // namespace seldet

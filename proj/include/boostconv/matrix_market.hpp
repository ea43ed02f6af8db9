#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include "boostconv/linalg.hpp"

namespace boostconv {

/// Reads `%%MatrixMarket matrix coordinate real {general|symmetric}`.
/// Symmetric storage is expanded to both triangles, duplicate entries are
/// summed. Throws ParseError naming the source and line on malformed input.
SparseMatrixCSR mm_read_matrix(const std::filesystem::path& path);
SparseMatrixCSR mm_read_matrix(std::istream& in, const std::string& source = "<stream>");

/// Reads a single-column `%%MatrixMarket matrix array real general` file.
DenseVector mm_read_vector(const std::filesystem::path& path);
DenseVector mm_read_vector(std::istream& in, const std::string& source = "<stream>");

}  // namespace boostconv

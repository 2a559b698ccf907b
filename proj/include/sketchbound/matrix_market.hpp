#pragma once

#include "sketchbound/matcore.hpp"

#include <filesystem>
#include <iosfwd>

namespace sketchbound {

/// Dense "%%MatrixMarket matrix array real general" files: a size line
/// "rows cols" followed by rows*cols values in column-major order. Values are
/// written with 17 significant digits so a write/read cycle is exact.
DenseMatrix read_matrix_market(std::istream& in);
DenseMatrix read_matrix_market(const std::filesystem::path& path);

void write_matrix_market(std::ostream& out, const DenseMatrix& M);
/// Writes through a temporary file in the same directory and renames it.
void write_matrix_market(const std::filesystem::path& path, const DenseMatrix& M);

/// Atomic text write used by all emitters.
void write_text_atomically(const std::filesystem::path& path, const std::string& text);

}  // namespace sketchbound

#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "sagopt/completion.hpp"
#include "sagopt/matrix.hpp"

namespace sagopt::bench {

// Binary layout: uint32 rows, uint32 cols (little-endian), then rows * cols
// little-endian IEEE-754 doubles in row-major order.
void write_matrix_binary(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_binary(const std::filesystem::path& path);

// One row per line, comma-separated, 17 significant digits.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

// Lines "i,j,value" with zero-based indices; an "i,j,value" header is written
// and tolerated on read.
void write_mask_csv(const std::filesystem::path& path, const std::vector<mc::Entry>& mask, const Vec& values);
std::pair<std::vector<mc::Entry>, Vec> read_mask_csv(const std::filesystem::path& path);

}  // namespace sagopt::bench

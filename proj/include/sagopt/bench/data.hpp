#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sagopt/completion.hpp"
#include "sagopt/matrix.hpp"

namespace sagopt::bench {

// M = A B^T / sqrt(rank) with A (rows x rank) and B (cols x rank) standard
// Gaussian, drawn in that order (A then B, row-major) from SplitMix64(seed).
Matrix generate_low_rank(std::size_t rows, std::size_t cols, std::size_t rank, std::uint64_t seed);

// floor(fraction * rows * cols) distinct entries chosen uniformly without
// replacement (partial Fisher-Yates), returned in row-major order.
std::vector<mc::Entry> sample_mask(std::size_t rows, std::size_t cols, double fraction, std::uint64_t seed);

struct DeskSpec {
  std::size_t rows = 200;
  std::size_t cols = 200;
  std::size_t rank = 4;
  double fraction = 0.3;
  double lambda = 1.0;
  std::uint64_t seed = 20240607;
};

// The matrix uses `seed`; the mask uses the first output of SplitMix64(seed ^ mask_salt).
inline constexpr std::uint64_t kMaskSalt = 0x6D61736B6D61736BULL;
mc::CompletionProblem make_problem(const DeskSpec& spec);

}  // namespace sagopt::bench

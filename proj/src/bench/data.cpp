#include "sagopt/bench/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sagopt/bench/rng.hpp"
#include "sagopt/errors.hpp"

namespace sagopt::bench {

Matrix generate_low_rank(std::size_t rows, std::size_t cols, std::size_t rank, std::uint64_t seed) {
  if (rows == 0 || cols == 0 || rank == 0 || rank > std::min(rows, cols))
    throw PreconditionError("generate_low_rank: need 1 <= rank <= min(rows, cols)");
  SplitMix64 rng(seed);
  Matrix a(rows, rank);
  Matrix b(cols, rank);
  for (double& v : a.flat()) v = rng.gaussian();
  for (double& v : b.flat()) v = rng.gaussian();
  const double scale = 1.0 / std::sqrt(static_cast<double>(rank));
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < rank; ++r) acc += a(i, r) * b(j, r);
      m(i, j) = scale * acc;
    }
  return m;
}

std::vector<mc::Entry> sample_mask(std::size_t rows, std::size_t cols, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) throw PreconditionError("sample_mask: fraction must lie in (0, 1]");
  const std::size_t n = rows * cols;
  // The small guard keeps products such as 0.3 * 40000 from rounding down.
  const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) * (1.0 + 1e-12)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  std::vector<mc::Entry> mask;
  mask.reserve(count);
  for (std::size_t e : idx) mask.emplace_back(e / cols, e % cols);
  return mask;
}

mc::CompletionProblem make_problem(const DeskSpec& spec) {
  const Matrix m = generate_low_rank(spec.rows, spec.cols, spec.rank, spec.seed);
  const std::uint64_t mask_seed = SplitMix64(spec.seed ^ kMaskSalt).next();
  return mc::CompletionProblem::from_matrix(m, sample_mask(spec.rows, spec.cols, spec.fraction, mask_seed),
                                            spec.lambda);
}

}  // namespace sagopt::bench

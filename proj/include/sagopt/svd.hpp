#pragma once

#include <cstddef>

#include "sagopt/matrix.hpp"

namespace sagopt::mc {

// Thin SVD X = U diag(sigma) V^T with r = min(rows, cols). sigma is sorted
// descending; columns of U and V are orthonormal, including those paired with
// zero singular values.
struct SvdFactors {
  Matrix U;
  Vec sigma;
  Matrix V;
};

struct SvdOptions {
  double tolerance = 1e-12;  // off-diagonal threshold relative to sqrt(alpha * beta)
  int max_sweeps = 60;
};

// One-sided (Hestenes) Jacobi. Throws NumericalFailure when max_sweeps is
// exhausted and PreconditionError on non-finite input.
SvdFactors svd(const Matrix& x, const SvdOptions& options = {});

double nuclear_norm(const Matrix& x);

// State shared by consecutive thresholding calls on nearby matrices (the
// iterates of one proximal run). Once the thresholded rank is small, svt()
// computes only the leading singular triplets by block subspace iteration
// started from the previous right singular vectors, and certifies that every
// discarded singular value lies below the threshold. When the certificate
// cannot be produced it falls back to the full Jacobi decomposition.
class SvtWorkspace {
 public:
  std::size_t last_rank() const noexcept { return last_rank_; }
  std::size_t full_calls() const noexcept { return full_calls_; }
  std::size_t partial_calls() const noexcept { return partial_calls_; }
  std::size_t fallbacks() const noexcept { return fallbacks_; }
  void reset() { *this = SvtWorkspace{}; }

  // Disables the partial path (every call runs the full decomposition).
  bool full_only = false;

 private:
  friend struct SvtEngine;
  Matrix right_;  // rows: previous right singular vectors with sigma > tau
  std::size_t last_rank_ = 0;
  bool has_history_ = false;
  std::size_t full_calls_ = 0;
  std::size_t partial_calls_ = 0;
  std::size_t fallbacks_ = 0;
};

struct SvtResult {
  Matrix x;
  double nuclear_norm = 0.0;  // of the thresholded output
  std::size_t rank = 0;
};

// Singular-value soft-thresholding U max(Sigma - tau, 0) V^T: the proximal map
// of tau * ||.||_* at y.
SvtResult svt(const Matrix& y, double tau, SvtWorkspace* workspace = nullptr,
              const SvdOptions& options = {});

}  // namespace sagopt::mc

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sagopt/matrix.hpp"
#include "sagopt/svd.hpp"

namespace sagopt::mc {

using Entry = std::pair<std::size_t, std::size_t>;

// F(X) = 1/2 ||P_Omega(X - M)||_F^2 + lambda ||X||_*.
class CompletionProblem {
 public:
  // mask: observed (i, j) pairs; values: M at those pairs, same order.
  CompletionProblem(std::size_t rows, std::size_t cols, std::vector<Entry> mask, Vec values,
                    double lambda_reg, std::optional<Matrix> m_true = std::nullopt);
  // Observes `m` on `mask`.
  static CompletionProblem from_matrix(const Matrix& m, std::vector<Entry> mask, double lambda_reg);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const std::vector<Entry>& mask() const noexcept { return mask_; }
  const Vec& values() const noexcept { return values_; }
  double lambda_reg() const noexcept { return lambda_; }
  const std::optional<Matrix>& m_true() const noexcept { return m_true_; }

  // M on Omega, zero elsewhere; the starting point of every run.
  const Matrix& m_obs() const noexcept { return m_obs_; }
  // 1 on Omega, 0 elsewhere.
  const Matrix& weights() const noexcept { return weights_; }
  bool full_mask() const noexcept { return mask_.size() == rows_ * cols_; }

  CompletionProblem with_lambda(double lambda_reg) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Entry> mask_;
  Vec values_;
  double lambda_;
  std::optional<Matrix> m_true_;
  Matrix m_obs_;
  Matrix weights_;
};

// g(X) = P_Omega(X - M).
Matrix smooth_grad(const Matrix& x, const CompletionProblem& p);
// Writes g(X) into g and returns G(X) = 1/2 ||g||_F^2.
double smooth_grad(const Matrix& x, const CompletionProblem& p, Matrix& g);
double smooth_value(const Matrix& x, const CompletionProblem& p);
double objective_value(const Matrix& x, const CompletionProblem& p);

enum class Algorithm { fista, apg, sfista };
std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

enum class Outcome { completed, diverged };
std::string_view to_string(Outcome o);

struct McTrajectory {
  Algorithm algorithm = Algorithm::fista;
  Vec values;          // values[k] = F(X_k); values[0] = F(X_0)
  Vec steps;           // step size used to produce X_{k+1} (constant without backtracking)
  Vec thresholds;      // SVT threshold of each iteration
  std::vector<std::size_t> ranks;  // rank of X_{k+1}
  std::vector<Matrix> iterates;    // only when RunOptions::keep_iterates
  Matrix x_final;
  Outcome outcome = Outcome::completed;
  std::optional<std::size_t> diverged_at;  // iteration whose output broke the rule
  std::string detail;
  // Backtracking only.
  std::vector<std::size_t> reductions;  // i_k per iteration
  std::size_t reduction_count = 0;
  std::size_t audit_violations = 0;
  // Thresholding work split (see SvtWorkspace).
  std::size_t svt_full = 0;
  std::size_t svt_partial = 0;
};

struct RunOptions {
  bool keep_iterates = false;
  // Forces the full decomposition in every thresholding step.
  bool full_svd_only = false;
  // F(X_0) when already known (scans reuse it across runs).
  std::optional<double> initial_value;
  // Starting point other than M_obs (same shape as the problem).
  std::optional<Matrix> x0;
};

// Divergence rule shared by all runs: F(X_k) > 1e3 F(X_0) or non-finite.
inline constexpr double kDivergenceFactor = 1e3;

// FISTA: X_k = prox_{lambda s}(Y_k - s g(Y_k)), t-sequence momentum, Y_1 = X_0 = M_obs.
McTrajectory fista_run(const CompletionProblem& p, double s, std::size_t iters, const RunOptions& opt = {});
// APG: Y_k = X_k + ((k-3)/k)(X_k - X_{k-1}) from X_1 = X_0 = M_obs.
McTrajectory apg_run(const CompletionProblem& p, double s, std::size_t iters, const RunOptions& opt = {});
// SFISTA: SAG extrapolation points Y_k, Z_k from X_2 = X_1 = X_0 = M_obs and
// X_{k+1} = prox_{lambda c_k}(Y_k - c_k g(Z_k)) with c_k = k s / (2k + 4).
McTrajectory sfista_run(const CompletionProblem& p, double s, std::size_t iters, const RunOptions& opt = {});
McTrajectory run(Algorithm a, const CompletionProblem& p, double s, std::size_t iters, const RunOptions& opt = {});

struct BacktrackConfig {
  double beta = 0.8;
  double s_init = 1.0;
  std::size_t max_halvings = 60;
};

// Each iteration shrinks s by beta until the sufficient-decrease test holds at
// the candidate: for FISTA/APG
//   G(X~) < G(Y) + <X~ - Y, g(Y)> + ||X~ - Y||^2 / (2s),
// for SFISTA the gradient is taken at Z and the quadratic weight is
// (2k + 4) / (2 k s). Steps carry over between iterations. Throws StallError
// when one iteration needs more than max_halvings reductions.
McTrajectory backtracking_run(Algorithm a, const CompletionProblem& p, const BacktrackConfig& cfg,
                              std::size_t iters, const RunOptions& opt = {});

}  // namespace sagopt::mc

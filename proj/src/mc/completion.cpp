#include "sagopt/completion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sagopt/errors.hpp"
#include "sagopt/kernels.hpp"

namespace sagopt::mc {

CompletionProblem::CompletionProblem(std::size_t rows, std::size_t cols, std::vector<Entry> mask, Vec values,
                                     double lambda_reg, std::optional<Matrix> m_true)
    : rows_(rows), cols_(cols), mask_(std::move(mask)), values_(std::move(values)), lambda_(lambda_reg),
      m_true_(std::move(m_true)), m_obs_(rows, cols), weights_(rows, cols) {
  if (rows == 0 || cols == 0) throw PreconditionError("CompletionProblem: dimensions must be positive");
  if (values_.size() != mask_.size()) throw PreconditionError("CompletionProblem: one value per mask entry");
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_))
    throw PreconditionError("CompletionProblem: lambda must be finite and nonnegative");
  if (m_true_ && (m_true_->rows() != rows || m_true_->cols() != cols))
    throw PreconditionError("CompletionProblem: ground truth has the wrong shape");
  for (std::size_t e = 0; e < mask_.size(); ++e) {
    const auto [i, j] = mask_[e];
    if (i >= rows || j >= cols) throw PreconditionError("CompletionProblem: mask entry out of bounds", e);
    if (!std::isfinite(values_[e])) throw PreconditionError("CompletionProblem: observed value not finite", e);
    if (weights_(i, j) != 0.0) throw PreconditionError("CompletionProblem: duplicate mask entry", e);
    weights_(i, j) = 1.0;
    m_obs_(i, j) = values_[e];
  }
}

CompletionProblem CompletionProblem::from_matrix(const Matrix& m, std::vector<Entry> mask, double lambda_reg) {
  Vec values;
  values.reserve(mask.size());
  for (const auto& [i, j] : mask) {
    if (i >= m.rows() || j >= m.cols()) throw PreconditionError("CompletionProblem: mask entry out of bounds");
    values.push_back(m(i, j));
  }
  return CompletionProblem(m.rows(), m.cols(), std::move(mask), std::move(values), lambda_reg, m);
}

CompletionProblem CompletionProblem::with_lambda(double lambda_reg) const {
  return CompletionProblem(rows_, cols_, mask_, values_, lambda_reg, m_true_);
}

namespace {

void check_shape(const Matrix& x, const CompletionProblem& p) {
  if (x.rows() != p.rows() || x.cols() != p.cols())
    throw PreconditionError("matrix completion: iterate shape does not match the problem");
}

}  // namespace

double smooth_grad(const Matrix& x, const CompletionProblem& p, Matrix& g) {
  check_shape(x, p);
  if (g.rows() != x.rows() || g.cols() != x.cols()) g = Matrix(x.rows(), x.cols());
  return 0.5 * kernels::masked_residual(p.weights().flat(), x.flat(), p.m_obs().flat(), g.flat());
}

Matrix smooth_grad(const Matrix& x, const CompletionProblem& p) {
  Matrix g(x.rows(), x.cols());
  smooth_grad(x, p, g);
  return g;
}

double smooth_value(const Matrix& x, const CompletionProblem& p) {
  Matrix g;
  return smooth_grad(x, p, g);
}

double objective_value(const Matrix& x, const CompletionProblem& p) {
  const double g = smooth_value(x, p);
  return p.lambda_reg() == 0.0 ? g : g + p.lambda_reg() * nuclear_norm(x);
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::fista:
      return "fista";
    case Algorithm::apg:
      return "apg";
    case Algorithm::sfista:
      return "sfista";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "fista") return Algorithm::fista;
  if (name == "apg") return Algorithm::apg;
  if (name == "sfista") return Algorithm::sfista;
  return std::nullopt;
}

std::string_view to_string(Outcome o) { return o == Outcome::completed ? "completed" : "diverged"; }

}  // namespace sagopt::mc

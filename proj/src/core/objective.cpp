#include "sagopt/objective.hpp"

#include <cmath>
#include <utility>

#include "sagopt/errors.hpp"
#include "sagopt/kernels.hpp"
#include "sagopt/svd.hpp"

namespace sagopt {

double largest_eigenvalue_psd(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  const mc::SvdFactors f = mc::svd(a);
  return f.sigma.front();
}

Quadratic::Quadratic(Matrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols()) throw PreconditionError("Quadratic: matrix must be square");
  for (std::size_t i = 0; i < a_.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (a_(i, j) != a_(j, i)) throw PreconditionError("Quadratic: matrix must be symmetric");
  lipschitz_ = largest_eigenvalue_psd(a_);
}

Quadratic Quadratic::isotropic(double mu, std::size_t dim) {
  return Quadratic(mu * Matrix::identity(dim));
}

Quadratic Quadratic::diagonal(std::span<const double> d) { return Quadratic(Matrix::diagonal(d)); }

double Quadratic::value(std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t i = 0; i < a_.rows(); ++i) total += x[i] * kernels::dot(a_.row(i), x);
  return 0.5 * total;
}

void Quadratic::gradient(std::span<const double> x, std::span<double> g) const {
  for (std::size_t i = 0; i < a_.rows(); ++i) g[i] = kernels::dot(a_.row(i), x);
}

Logistic::Logistic(Matrix features, Vec labels, double ridge)
    : features_(std::move(features)), labels_(std::move(labels)), ridge_(ridge) {
  if (features_.rows() != labels_.size() || features_.rows() == 0)
    throw PreconditionError("Logistic: one label per feature row required");
  if (!(ridge_ >= 0.0)) throw PreconditionError("Logistic: ridge must be nonnegative");
  const Matrix gram = matmul_tn(features_, features_);
  lipschitz_ = largest_eigenvalue_psd(gram) / (4.0 * static_cast<double>(features_.rows())) + ridge_;
}

Logistic Logistic::demo() {
  Matrix a(8, 2, {1.0, 2.0, 2.0, 0.5, -1.0, 1.5, 0.5, -1.0, -2.0, -0.5, 1.5, 1.0, -0.5, -2.0, 0.0, 1.0});
  Vec y = {1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, -1.0};
  return Logistic(std::move(a), std::move(y), 0.1);
}

namespace {
// log(1 + exp(u)) without overflow.
double softplus(double u) { return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }
double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}
}  // namespace

double Logistic::value(std::span<const double> w) const {
  double loss = 0.0;
  for (std::size_t i = 0; i < features_.rows(); ++i)
    loss += softplus(-labels_[i] * kernels::dot(features_.row(i), w));
  return loss / static_cast<double>(features_.rows()) + 0.5 * ridge_ * kernels::sumsq(w);
}

void Logistic::gradient(std::span<const double> w, std::span<double> g) const {
  const double inv_m = 1.0 / static_cast<double>(features_.rows());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = ridge_ * w[j];
  for (std::size_t i = 0; i < features_.rows(); ++i) {
    const double margin = labels_[i] * kernels::dot(features_.row(i), w);
    kernels::axpy(-labels_[i] * sigmoid(-margin) * inv_m, features_.row(i), g);
  }
}

std::optional<Matrix> Logistic::curvature_at(std::span<const double> w) const {
  const std::size_t d = dim();
  Matrix h = ridge_ * Matrix::identity(d);
  const double inv_m = 1.0 / static_cast<double>(features_.rows());
  for (std::size_t i = 0; i < features_.rows(); ++i) {
    const double p = sigmoid(kernels::dot(features_.row(i), w));
    const double c = p * (1.0 - p) * inv_m;
    const auto a = features_.row(i);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t s = 0; s < d; ++s) h(r, s) += c * a[r] * a[s];
  }
  return h;
}

Shifted::Shifted(std::shared_ptr<const Objective> base, Vec shift)
    : base_(std::move(base)), shift_(std::move(shift)) {
  if (!base_ || shift_.size() != base_->dim())
    throw PreconditionError("Shifted: shift dimension must match the objective");
}

Vec Shifted::shifted(std::span<const double> x) const {
  Vec y(x.begin(), x.end());
  kernels::axpy(-1.0, shift_, y);
  return y;
}

double Shifted::value(std::span<const double> x) const { return base_->value(shifted(x)); }

void Shifted::gradient(std::span<const double> x, std::span<double> g) const {
  base_->gradient(shifted(x), g);
}

std::optional<Matrix> Shifted::curvature_at(std::span<const double> x) const {
  return base_->curvature_at(shifted(x));
}

}  // namespace sagopt

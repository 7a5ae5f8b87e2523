#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>

#include "sagopt/matrix.hpp"

namespace sagopt {

// Smooth convex function oracle. Implementations are immutable after
// construction and safe for concurrent read-only use.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  // Writes grad F(x) into g (g.size() == dim()).
  virtual void gradient(std::span<const double> x, std::span<double> g) const = 0;
  // Gradient Lipschitz constant, when known.
  virtual std::optional<double> lipschitz() const { return std::nullopt; }
  // Hessian at x as a dense dim x dim matrix, when available.
  virtual std::optional<Matrix> curvature_at(std::span<const double> x) const {
    (void)x;
    return std::nullopt;
  }

  Vec gradient(std::span<const double> x) const {
    Vec g(dim());
    gradient(x, g);
    return g;
  }
};

// F(x) = 1/2 x^T A x with A symmetric positive semidefinite.
class Quadratic final : public Objective {
 public:
  explicit Quadratic(Matrix a);
  // 1/2 mu ||x||^2 in `dim` dimensions.
  static Quadratic isotropic(double mu, std::size_t dim = 1);
  static Quadratic diagonal(std::span<const double> d);

  std::size_t dim() const override { return a_.rows(); }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> g) const override;
  std::optional<double> lipschitz() const override { return lipschitz_; }
  std::optional<Matrix> curvature_at(std::span<const double>) const override { return a_; }
  const Matrix& matrix() const noexcept { return a_; }

  using Objective::gradient;

 private:
  Matrix a_;
  double lipschitz_ = 0.0;
};

// Mean logistic loss with a ridge term:
//   F(w) = (1/m) sum_i log(1 + exp(-y_i <a_i, w>)) + (ridge/2) ||w||^2,
// labels y_i in {-1, +1}, rows a_i of `features`.
class Logistic final : public Objective {
 public:
  Logistic(Matrix features, Vec labels, double ridge);
  // Small fixed 2-D instance used by the order experiments.
  static Logistic demo();

  std::size_t dim() const override { return features_.cols(); }
  double value(std::span<const double> w) const override;
  void gradient(std::span<const double> w, std::span<double> g) const override;
  std::optional<double> lipschitz() const override { return lipschitz_; }
  std::optional<Matrix> curvature_at(std::span<const double> w) const override;

  using Objective::gradient;

 private:
  Matrix features_;
  Vec labels_;
  double ridge_;
  double lipschitz_ = 0.0;
};

// G(x) = F(x - c).
class Shifted final : public Objective {
 public:
  Shifted(std::shared_ptr<const Objective> base, Vec shift);

  std::size_t dim() const override { return base_->dim(); }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> g) const override;
  std::optional<double> lipschitz() const override { return base_->lipschitz(); }
  std::optional<Matrix> curvature_at(std::span<const double> x) const override;

  using Objective::gradient;

 private:
  Vec shifted(std::span<const double> x) const;
  std::shared_ptr<const Objective> base_;
  Vec shift_;
};

// Forwards to a base objective and counts gradient calls.
class CountingObjective final : public Objective {
 public:
  explicit CountingObjective(const Objective& base) : base_(base) {}

  std::size_t dim() const override { return base_.dim(); }
  double value(std::span<const double> x) const override { return base_.value(x); }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    gradient_calls_.fetch_add(1, std::memory_order_relaxed);
    base_.gradient(x, g);
  }
  std::optional<double> lipschitz() const override { return base_.lipschitz(); }
  std::optional<Matrix> curvature_at(std::span<const double> x) const override {
    return base_.curvature_at(x);
  }

  std::size_t gradient_calls() const noexcept { return gradient_calls_.load(); }
  void reset() noexcept { gradient_calls_.store(0); }

  using Objective::gradient;

 private:
  const Objective& base_;
  mutable std::atomic<std::size_t> gradient_calls_{0};
};

// Largest eigenvalue of a symmetric PSD matrix (via the Jacobi SVD).
double largest_eigenvalue_psd(const Matrix& a);

}  // namespace sagopt

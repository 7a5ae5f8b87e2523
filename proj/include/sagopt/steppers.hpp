#pragma once

#include <array>

#include "sagopt/matrix.hpp"
#include "sagopt/objective.hpp"
#include "sagopt/rational.hpp"

namespace sagopt {

// One-sequence NAG:
//   y = x_n + ((n-3)/n)(x_n - x_{n-1}),  x_{n+1} = y - s grad F(y).
struct NagState {
  Vec x_curr;
  Vec x_prev;
  long n = 1;
  double s = 0.0;
};

// SAG with history X_k, X_{k-1}, X_{k-2}:
//   Y = a1 X_k + a2 X_{k-1} + a3 X_{k-2},  Z = b1 X_k + b2 X_{k-1},
//   X_{k+1} = Y - (k s / (2k + 4)) grad F(Z).
struct SagState {
  Vec x_curr;
  Vec x_prev;
  Vec x_prev2;
  long k = 2;
  double s = 0.0;
};

// Gradient step with the t-sequence momentum of FISTA:
//   y = x_curr + ((t_prev - 1)/t)(x_curr - x_prev),  x_next = y - s grad F(y),
//   t_next = (1 + sqrt(1 + 4 t^2)) / 2.
// Starts from t_prev = t = 1 and x_prev = x_curr, so the first step is plain GD.
struct TSeqState {
  Vec x_curr;
  Vec x_prev;
  double t_prev = 1.0;
  double t = 1.0;
  long k = 1;
  double s = 0.0;
};

struct SagWeights {
  std::array<double, 3> y{};  // X_k, X_{k-1}, X_{k-2}
  std::array<double, 2> z{};  // X_k, X_{k-1}
  double grad_scale = 0.0;    // k / (2k + 4); the step multiplies it by s
};

struct ExactSagWeights {
  std::array<Rational, 3> y{};
  std::array<Rational, 2> z{};
  Rational grad_scale{};
};

// out = x + beta (x - x_prev). Written in difference form so that equal
// history points reproduce x exactly.
void extrapolate(std::span<const double> x, std::span<const double> x_prev, double beta,
                 std::span<double> out);
// Y and Z of SAG in difference form (the weights sum to 1):
//   Y = X_k + y[1](X_{k-1} - X_k) + y[2](X_{k-2} - X_k),  Z = X_k + z[1](X_{k-1} - X_k).
void sag_points(const SagWeights& w, std::span<const double> x, std::span<const double> x_prev,
                std::span<const double> x_prev2, std::span<double> y, std::span<double> z);

double nag_momentum(long n);
SagWeights sag_weights(long k);
ExactSagWeights sag_weights_exact(long k);
double fista_t_next(double t);

NagState nag_initial(const Vec& x0, double s);
SagState sag_initial(const Vec& x0, double s);
TSeqState tseq_initial(const Vec& x0, double s);

// Each step evaluates the gradient exactly once. Non-finite intermediate or
// gradient entries raise DivergedError carrying the entry index.
NagState nag_step(const NagState& state, const Objective& f);
SagState sag_step(const SagState& state, const Objective& f);
TSeqState tseq_step(const TSeqState& state, const Objective& f);
Vec gd_step(std::span<const double> x, const Objective& f, double s);

}  // namespace sagopt

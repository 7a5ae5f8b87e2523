#include "sagopt/steppers.hpp"

#include <cmath>
#include <string>

#include "sagopt/errors.hpp"
#include "sagopt/kernels.hpp"

namespace sagopt {

namespace {

void check_finite(std::span<const double> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw DivergedError(std::string(what) + " has a non-finite entry at index " + std::to_string(i), i);
}

void check_dims(const Objective& f, std::size_t n, const char* who) {
  if (n != f.dim()) throw PreconditionError(std::string(who) + ": state dimension does not match objective");
}

void check_step(double s, const char* who) {
  if (!(s > 0.0) || !std::isfinite(s)) throw PreconditionError(std::string(who) + ": step size must be positive");
}

}  // namespace

void extrapolate(std::span<const double> x, std::span<const double> x_prev, double beta,
                 std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + beta * (x[i] - x_prev[i]);
}

void sag_points(const SagWeights& w, std::span<const double> x, std::span<const double> x_prev,
                std::span<const double> x_prev2, std::span<double> y, std::span<double> z) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d1 = x_prev[i] - x[i];
    const double d2 = x_prev2[i] - x[i];
    y[i] = x[i] + w.y[1] * d1 + w.y[2] * d2;
    z[i] = x[i] + w.z[1] * d1;
  }
}

double nag_momentum(long n) { return static_cast<double>(n - 3) / static_cast<double>(n); }

SagWeights sag_weights(long k) {
  const double kk = static_cast<double>(k);
  SagWeights w;
  w.y = {(10.0 * kk * kk + 9.0 * kk + 6.0) / (4.0 * kk * kk + 8.0 * kk),
         -(4.0 * kk * kk + 3.0) / (2.0 * kk * kk + 4.0 * kk), (2.0 * kk - 1.0) / (4.0 * kk + 8.0)};
  w.z = {(2.0 * kk - 3.0) / kk, -(kk - 3.0) / kk};
  w.grad_scale = kk / (2.0 * kk + 4.0);
  return w;
}

ExactSagWeights sag_weights_exact(long k) {
  const std::int64_t n = k;
  ExactSagWeights w;
  w.y = {Rational(10 * n * n + 9 * n + 6, 4 * n * n + 8 * n), -Rational(4 * n * n + 3, 2 * n * n + 4 * n),
         Rational(2 * n - 1, 4 * n + 8)};
  w.z = {Rational(2 * n - 3, n), -Rational(n - 3, n)};
  w.grad_scale = Rational(n, 2 * n + 4);
  return w;
}

double fista_t_next(double t) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)); }

NagState nag_initial(const Vec& x0, double s) { return NagState{x0, x0, 1, s}; }
SagState sag_initial(const Vec& x0, double s) { return SagState{x0, x0, x0, 2, s}; }
TSeqState tseq_initial(const Vec& x0, double s) { return TSeqState{x0, x0, 1.0, 1.0, 1, s}; }

NagState nag_step(const NagState& st, const Objective& f) {
  if (st.n < 1) throw PreconditionError("nag_step: n must be >= 1");
  check_step(st.s, "nag_step");
  check_dims(f, st.x_curr.size(), "nag_step");
  const double beta = nag_momentum(st.n);
  Vec y(st.x_curr.size());
  extrapolate(st.x_curr, st.x_prev, beta, y);
  check_finite(y, "nag_step: extrapolated point");
  Vec g = f.gradient(y);
  check_finite(g, "nag_step: gradient");
  kernels::axpy(-st.s, g, y);
  return NagState{std::move(y), st.x_curr, st.n + 1, st.s};
}

SagState sag_step(const SagState& st, const Objective& f) {
  if (st.k < 2) throw PreconditionError("sag_step: k must be >= 2");
  check_step(st.s, "sag_step");
  check_dims(f, st.x_curr.size(), "sag_step");
  const SagWeights w = sag_weights(st.k);
  const std::size_t d = st.x_curr.size();
  Vec y(d);
  Vec z(d);
  sag_points(w, st.x_curr, st.x_prev, st.x_prev2, y, z);
  check_finite(y, "sag_step: Y");
  check_finite(z, "sag_step: Z");
  const Vec g = f.gradient(z);
  check_finite(g, "sag_step: gradient");
  kernels::axpy(-w.grad_scale * st.s, g, y);
  return SagState{std::move(y), st.x_curr, st.x_prev, st.k + 1, st.s};
}

TSeqState tseq_step(const TSeqState& st, const Objective& f) {
  check_step(st.s, "tseq_step");
  check_dims(f, st.x_curr.size(), "tseq_step");
  const double beta = (st.t_prev - 1.0) / st.t;
  Vec y(st.x_curr.size());
  extrapolate(st.x_curr, st.x_prev, beta, y);
  check_finite(y, "tseq_step: extrapolated point");
  Vec g = f.gradient(y);
  check_finite(g, "tseq_step: gradient");
  kernels::axpy(-st.s, g, y);
  return TSeqState{std::move(y), st.x_curr, st.t, fista_t_next(st.t), st.k + 1, st.s};
}

Vec gd_step(std::span<const double> x, const Objective& f, double s) {
  check_step(s, "gd_step");
  check_dims(f, x.size(), "gd_step");
  Vec out(x.begin(), x.end());
  const Vec g = f.gradient(x);
  check_finite(g, "gd_step: gradient");
  kernels::axpy(-s, g, out);
  return out;
}

}  // namespace sagopt

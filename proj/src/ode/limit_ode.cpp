#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "sagopt/errors.hpp"
#include "sagopt/kernels.hpp"
#include "sagopt/ode.hpp"

namespace sagopt::ode {

namespace {

bool finite(const Vec& v) {
  for (double e : v)
    if (!std::isfinite(e)) return false;
  return true;
}

// Cubic Hermite basis on [0, 1] and its derivative.
struct Hermite {
  double h00, h10, h01, h11;
};

Hermite basis(double tau) {
  const double t2 = tau * tau;
  const double t3 = t2 * tau;
  return {2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + tau, -2.0 * t3 + 3.0 * t2, t3 - t2};
}

Hermite basis_derivative(double tau) {
  const double t2 = tau * tau;
  return {6.0 * t2 - 6.0 * tau, 3.0 * t2 - 4.0 * tau + 1.0, -6.0 * t2 + 6.0 * tau, 3.0 * t2 - 2.0 * tau};
}

// y(t) from values p and slopes m at the ends of a segment of width dt.
Vec blend(const Hermite& b, double dt, const Vec& p0, const Vec& m0, const Vec& p1, const Vec& m1,
          double scale) {
  Vec out(p0.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = scale * (b.h00 * p0[i] + b.h10 * dt * m0[i] + b.h01 * p1[i] + b.h11 * dt * m1[i]);
  return out;
}

}  // namespace

OdeSolution::OdeSolution(const Objective& f, Vec x0, double h_ref, std::vector<double> t,
                         std::vector<Vec> x, std::vector<Vec> v, std::vector<Vec> a)
    : f_(&f), x0_(std::move(x0)), h_ref_(h_ref), t_(std::move(t)), x_(std::move(x)), v_(std::move(v)),
      a_(std::move(a)) {
  if (t_.size() < 2 || x_.size() != t_.size() || v_.size() != t_.size() || a_.size() != t_.size())
    throw PreconditionError("OdeSolution: grid and value arrays must agree and hold >= 2 nodes");
}

std::size_t OdeSolution::segment(double t) const {
  if (!(t >= t_.front()) || !(t <= t_.back()))
    throw PreconditionError("OdeSolution: t = " + std::to_string(t) + " outside [" +
                            std::to_string(t_.front()) + ", " + std::to_string(t_.back()) + "]");
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - t_.begin());
  if (i == 0) i = 1;
  if (i >= t_.size()) i = t_.size() - 1;
  return i - 1;
}

Vec OdeSolution::x(double t) const {
  if (t >= 0.0 && t < t_.front()) {
    Vec out = x0_;
    const Vec g = f_->gradient(x0_);
    kernels::axpy(-t * t / 8.0, g, out);
    return out;
  }
  const std::size_t i = segment(t);
  const double dt = t_[i + 1] - t_[i];
  return blend(basis((t - t_[i]) / dt), dt, x_[i], v_[i], x_[i + 1], v_[i + 1], 1.0);
}

Vec OdeSolution::v(double t) const {
  if (t >= 0.0 && t < t_.front()) {
    Vec out = f_->gradient(x0_);
    for (double& e : out) e *= -t / 4.0;
    return out;
  }
  const std::size_t i = segment(t);
  const double dt = t_[i + 1] - t_[i];
  return blend(basis((t - t_[i]) / dt), dt, v_[i], a_[i], v_[i + 1], a_[i + 1], 1.0);
}

Vec OdeSolution::accel(double t) const {
  const std::size_t i = segment(t);
  const double dt = t_[i + 1] - t_[i];
  return blend(basis_derivative((t - t_[i]) / dt), dt, v_[i], a_[i], v_[i + 1], a_[i + 1], 1.0 / dt);
}

double OdeSolution::residual(double t) const {
  if (!(t > 0.0)) throw PreconditionError("OdeSolution::residual: t must be positive");
  Vec r = accel(t);
  const Vec vel = v(t);
  const Vec g = f_->gradient(x(t));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += 3.0 / t * vel[i] + g[i];
  return std::sqrt(kernels::sumsq(r));
}

OdeSolution solve_limit_ode(const Objective& f, const Vec& x0, double T, double h_ref) {
  if (!(h_ref > 0.0) || !std::isfinite(h_ref)) throw PreconditionError("solve_limit_ode: h_ref must be positive");
  if (!(T > kLaunchTime) || !std::isfinite(T))
    throw PreconditionError("solve_limit_ode: T must exceed the launch time 1e-4");
  if (x0.size() != f.dim()) throw PreconditionError("solve_limit_ode: x0 dimension mismatch");
  if (!finite(x0)) throw PreconditionError("solve_limit_ode: x0 must be finite");

  const std::size_t d = x0.size();
  auto accel_at = [&](double t, const Vec& x, const Vec& v) {
    Vec a = f.gradient(x);
    for (std::size_t i = 0; i < d; ++i) a[i] = -3.0 / t * v[i] - a[i];
    return a;
  };

  const double t0 = kLaunchTime;
  const Vec g0 = f.gradient(x0);
  Vec x = x0;
  Vec v(d);
  for (std::size_t i = 0; i < d; ++i) {
    x[i] -= t0 * t0 / 8.0 * g0[i];
    v[i] = -t0 / 4.0 * g0[i];
  }

  std::vector<double> ts{t0};
  std::vector<Vec> xs{x};
  std::vector<Vec> vs{v};
  std::vector<Vec> as{accel_at(t0, x, v)};

  // Classical RK4 for (x, v)' = (v, a(t, x, v)); k1 reuses the stored node acceleration.
  auto step = [&](double t, double t_new) {
    const double h = t_new - t;
    const Vec& a1 = as.back();
    Vec x2(d), v2(d), x3(d), v3(d), x4(d), v4(d);
    for (std::size_t i = 0; i < d; ++i) {
      x2[i] = x[i] + 0.5 * h * v[i];
      v2[i] = v[i] + 0.5 * h * a1[i];
    }
    const Vec a2 = accel_at(t + 0.5 * h, x2, v2);
    for (std::size_t i = 0; i < d; ++i) {
      x3[i] = x[i] + 0.5 * h * v2[i];
      v3[i] = v[i] + 0.5 * h * a2[i];
    }
    const Vec a3 = accel_at(t + 0.5 * h, x3, v3);
    for (std::size_t i = 0; i < d; ++i) {
      x4[i] = x[i] + h * v3[i];
      v4[i] = v[i] + h * a3[i];
    }
    const Vec a4 = accel_at(t + h, x4, v4);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] += h / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
      v[i] += h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
    }
    if (!finite(x) || !finite(v))
      throw IntegrationFailure("solve_limit_ode: non-finite state after t = " + std::to_string(t), t);
    ts.push_back(t_new);
    xs.push_back(x);
    vs.push_back(v);
    as.push_back(accel_at(t_new, x, v));
    if (!finite(as.back()))
      throw IntegrationFailure("solve_limit_ode: non-finite acceleration at t = " + std::to_string(t_new), t);
  };

  // Geometric ramp from t0 to the first multiple of h_ref above t0 (or T).
  double k_first = std::floor(t0 / h_ref) + 1.0;
  const double first_node = std::min(k_first * h_ref, T);
  double t = t0;
  while (t < first_node) {
    double next = t + t / 20.0;
    if (next > first_node - 0.5 * (next - t)) next = first_node;
    step(t, next);
    t = next;
  }
  // Uniform nodes k * h_ref; the final step is clipped to land on T.
  for (double k = k_first; t < T; k += 1.0) {
    double next = (k + 1.0) * h_ref;
    if (next > T * (1.0 - 1e-12)) next = T;
    step(t, next);
    t = next;
  }
  return OdeSolution(f, x0, h_ref, std::move(ts), std::move(xs), std::move(vs), std::move(as));
}

}  // namespace sagopt::ode

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sagopt/matrix.hpp"
#include "sagopt/objective.hpp"
#include "sagopt/scheme.hpp"

namespace sagopt::ode {

// Start time of the numerical integration; the singular 3/t term is bridged
// by the series x(t) = x0 - (t^2/8) grad F(x0) + O(t^4).
inline constexpr double kLaunchTime = 1e-4;

// Dense trajectory of x'' + (3/t) x' + grad F(x) = 0, x(0) = x0, x'(0) = 0.
// Holds a reference to the objective, which must outlive the solution.
class OdeSolution {
 public:
  OdeSolution(const Objective& f, Vec x0, double h_ref, std::vector<double> t, std::vector<Vec> x,
              std::vector<Vec> v, std::vector<Vec> a);

  const std::vector<double>& t_grid() const noexcept { return t_; }
  const std::vector<Vec>& x_vals() const noexcept { return x_; }
  const std::vector<Vec>& v_vals() const noexcept { return v_; }
  const Objective& objective() const noexcept { return *f_; }
  const Vec& x0() const noexcept { return x0_; }
  double h_ref() const noexcept { return h_ref_; }
  double t0() const noexcept { return t_.front(); }
  double t_end() const noexcept { return t_.back(); }

  // x(t) on [0, t_end]. Cubic Hermite on (x, x') for t >= t0; the launch
  // series below t0. Throws PreconditionError outside the range.
  Vec x(double t) const;
  // x'(t) from the cubic Hermite of (x', x'').
  Vec v(double t) const;
  // x''(t) as the derivative of the Hermite interpolant of (x', x'').
  Vec accel(double t) const;
  // ||x'' + (3/t) x' + grad F(x)|| with all three terms taken from the
  // interpolants at t.
  double residual(double t) const;

 private:
  std::size_t segment(double t) const;
  const Objective* f_;
  Vec x0_;
  double h_ref_;
  std::vector<double> t_;
  std::vector<Vec> x_;
  std::vector<Vec> v_;
  std::vector<Vec> a_;
};

// Launch at t0 = 1e-4 from the series, then classical RK4 on (x, v). Steps
// grow geometrically (h = t/20) until the first multiple of h_ref, after
// which nodes sit at integer multiples of h_ref (the last step is clipped to
// land on T). Non-finite state raises IntegrationFailure.
OdeSolution solve_limit_ode(const Objective& f, const Vec& x0, double T, double h_ref);

// Norm of L[x(t); h] for NAG:
//   x(t+h) - ((2t-3h)/t) x(t) + ((t-3h)/t) x(t-h) + h^2 grad F(x(t) + ((t-3h)/t)(x(t)-x(t-h))).
double nag_truncation(const OdeSolution& sol, double t, double h);

// Norm of L[x(t); h] for the four-term scheme:
//   sum_i (alpha_i + beta_i h/t + gamma_i h^2/t^2) x(t + (2-i)h) + the NAG gradient term.
double sag_truncation(const OdeSolution& sol, double t, double h,
                      const SchemeCoefficients& c = scheme_coefficients(0.5, 0.0, 3.0));

double truncation(Scheme scheme, const OdeSolution& sol, double t, double h);

struct TruncationReport {
  Scheme scheme = Scheme::nag;
  double t = 0.0;
  std::vector<double> h_list;
  std::vector<double> l_values;
  double slope = 0.0;      // NaN when exact
  double r_squared = 0.0;  // NaN when exact
  bool exact = false;      // all L are zero
  bool success = false;    // R^2 >= 0.99 and not exact
};

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
// Ordinary least squares of y on x.
Fit least_squares(std::span<const double> x, std::span<const double> y);

// h_list must hold >= 5 strictly decreasing, dyadically spaced values.
TruncationReport estimate_order(Scheme scheme, const OdeSolution& sol, double t,
                                std::span<const double> h_list);
// Builds its own reference solution with h_ref = min(h)/20.
TruncationReport estimate_order(Scheme scheme, const Objective& f, const Vec& x0, double t,
                                std::span<const double> h_list);

// ||x_n - x(t)|| after n = t/h steps of the scheme with s = h^2, started from
// exact ODE samples (NAG: x(0), x(h); SAG additionally x(2h)). Throws
// DivergedError if the scheme blows up.
double convergence_gap(Scheme scheme, const OdeSolution& sol, double t, double h);
double convergence_gap(Scheme scheme, const Objective& f, const Vec& x0, double t, double h);

// Dyadic ladder h0 * 2^{-j}, j = 0..count-1.
std::vector<double> dyadic_ladder(double h0, std::size_t count);

}  // namespace sagopt::ode

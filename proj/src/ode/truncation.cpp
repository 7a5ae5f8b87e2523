#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sagopt/errors.hpp"
#include "sagopt/kernels.hpp"
#include "sagopt/ode.hpp"
#include "sagopt/steppers.hpp"

namespace sagopt::ode {

namespace {

void require_window(const OdeSolution& sol, double lo, double hi, const char* who) {
  if (!(lo >= sol.t0()) || !(hi <= sol.t_end()))
    throw PreconditionError(std::string(who) + ": stencil [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "] leaves the solution range");
}

// h^2 grad F(x(t) + ((t-3h)/t)(x(t) - x(t-h))), added into l.
void add_gradient_term(const OdeSolution& sol, const Vec& xt, const Vec& xm, double t, double h,
                       Vec& l) {
  Vec y(xt.size());
  extrapolate(xt, xm, (t - 3.0 * h) / t, y);
  const Vec g = sol.objective().gradient(y);
  kernels::axpy(h * h, g, l);
}

}  // namespace

double nag_truncation(const OdeSolution& sol, double t, double h) {
  if (!(h > 0.0) || !(t > 0.0)) throw PreconditionError("nag_truncation: t and h must be positive");
  require_window(sol, t - h, t + h, "nag_truncation");
  const Vec xp = sol.x(t + h);
  const Vec xt = sol.x(t);
  const Vec xm = sol.x(t - h);
  // x(t+h) - ((2t-3h)/t) x(t) + ((t-3h)/t) x(t-h), grouped as differences so
  // that constant solutions give exactly zero.
  const double c = (t - 3.0 * h) / t;
  Vec l(xt.size());
  for (std::size_t i = 0; i < l.size(); ++i) l[i] = (xp[i] - xt[i]) - c * (xt[i] - xm[i]);
  add_gradient_term(sol, xt, xm, t, h, l);
  return std::sqrt(kernels::sumsq(l));
}

double sag_truncation(const OdeSolution& sol, double t, double h, const SchemeCoefficients& c) {
  if (!(h > 0.0) || !(t > 0.0)) throw PreconditionError("sag_truncation: t and h must be positive");
  require_window(sol, t - 2.0 * h, t + h, "sag_truncation");
  const double r = h / t;
  std::array<double, 4> w{};
  for (int i = 0; i < 4; ++i) w[i] = c.alpha[i] + c.beta[i] * r + c.gamma[i] * r * r;
  const Vec x1 = sol.x(t + h);
  const Vec x2 = sol.x(t);
  const Vec x3 = sol.x(t - h);
  const Vec x4 = sol.x(t - 2.0 * h);
  // The weights sum to zero, so the combination is taken relative to x(t).
  Vec l(x2.size());
  for (std::size_t i = 0; i < l.size(); ++i)
    l[i] = w[0] * (x1[i] - x2[i]) + w[2] * (x3[i] - x2[i]) + w[3] * (x4[i] - x2[i]);
  add_gradient_term(sol, x2, x3, t, h, l);
  return std::sqrt(kernels::sumsq(l));
}

double truncation(Scheme scheme, const OdeSolution& sol, double t, double h) {
  return scheme == Scheme::nag ? nag_truncation(sol, t, h) : sag_truncation(sol, t, h);
}

Fit least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw PreconditionError("least_squares: need >= 2 paired samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("least_squares: x values are all equal");
  Fit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

std::vector<double> dyadic_ladder(double h0, std::size_t count) {
  std::vector<double> h(count);
  for (std::size_t j = 0; j < count; ++j) h[j] = std::ldexp(h0, -static_cast<int>(j));
  return h;
}

namespace {

void check_ladder(std::span<const double> h) {
  if (h.size() < 5) throw PreconditionError("estimate_order: need at least 5 step sizes");
  for (std::size_t j = 1; j < h.size(); ++j) {
    if (!(h[j] < h[j - 1])) throw PreconditionError("estimate_order: h_list must be strictly decreasing", j);
    const double ratio = h[j - 1] / h[j];
    if (std::abs(ratio - 2.0) > 1e-9) throw PreconditionError("estimate_order: h_list must be dyadic", j);
  }
}

}  // namespace

TruncationReport estimate_order(Scheme scheme, const OdeSolution& sol, double t,
                                std::span<const double> h_list) {
  check_ladder(h_list);
  TruncationReport rep;
  rep.scheme = scheme;
  rep.t = t;
  rep.h_list.assign(h_list.begin(), h_list.end());
  bool all_zero = true;
  bool any_zero = false;
  for (double h : h_list) {
    const double l = truncation(scheme, sol, t, h);
    rep.l_values.push_back(l);
    if (l == 0.0) {
      any_zero = true;
    } else {
      all_zero = false;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (all_zero) {
    rep.exact = true;
    rep.slope = nan;
    rep.r_squared = nan;
    return rep;
  }
  if (any_zero) {
    rep.slope = nan;
    rep.r_squared = nan;
    return rep;
  }
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < h_list.size(); ++j) {
    lx.push_back(std::log(h_list[j]));
    ly.push_back(std::log(rep.l_values[j]));
  }
  const Fit fit = least_squares(lx, ly);
  rep.slope = fit.slope;
  rep.r_squared = fit.r_squared;
  rep.success = fit.r_squared >= 0.99;
  return rep;
}

TruncationReport estimate_order(Scheme scheme, const Objective& f, const Vec& x0, double t,
                                std::span<const double> h_list) {
  check_ladder(h_list);
  const double h_max = h_list.front();
  const double h_min = h_list.back();
  const OdeSolution sol = solve_limit_ode(f, x0, t + h_max, h_min / 20.0);
  return estimate_order(scheme, sol, t, h_list);
}

double convergence_gap(Scheme scheme, const OdeSolution& sol, double t, double h) {
  if (!(h > 0.0) || !(t > 0.0)) throw PreconditionError("convergence_gap: t and h must be positive");
  const double steps = std::round(t / h);
  if (std::abs(steps * h - t) > 1e-9 * t) throw PreconditionError("convergence_gap: t/h must be an integer");
  if (steps < 4.0) throw PreconditionError("convergence_gap: need t/h >= 4");
  if (t > sol.t_end()) throw PreconditionError("convergence_gap: t beyond the solution range");
  const long n_final = static_cast<long>(steps);
  const Objective& f = sol.objective();
  const double s = h * h;

  Vec x_final;
  if (scheme == Scheme::nag) {
    NagState st{sol.x(h), sol.x(0.0), 1, s};
    while (st.n < n_final) st = nag_step(st, f);
    x_final = std::move(st.x_curr);
  } else {
    SagState st{sol.x(2.0 * h), sol.x(h), sol.x(0.0), 2, s};
    while (st.k < n_final) st = sag_step(st, f);
    x_final = std::move(st.x_curr);
  }
  const Vec xt = sol.x(steps * h);
  Vec diff(xt.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = x_final[i] - xt[i];
  return std::sqrt(kernels::sumsq(diff));
}

double convergence_gap(Scheme scheme, const Objective& f, const Vec& x0, double t, double h) {
  const OdeSolution sol = solve_limit_ode(f, x0, t, h / 20.0);
  return convergence_gap(scheme, sol, t, h);
}

}  // namespace sagopt::ode

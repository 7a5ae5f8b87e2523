#include <algorithm>
#include <cmath>
#include <numbers>

#include "sagopt/errors.hpp"
#include "sagopt/stability.hpp"

namespace sagopt::stability {

CharPoly nag_char(double z) { return CharPoly{2, {1.0, -(2.0 - 2.0 * z), 1.0 - z}, z, false}; }

CharPoly sag_char(double z) {
  return CharPoly{3, {1.0, -(2.5 - z), 2.0 - 0.5 * z, -0.5}, z, true};
}

std::array<double, 3> sag_quadratic_factor(double z) { return {1.0, -(2.0 - z), 1.0}; }

CharPoly limit_char(const RecurrenceWeights<double>& w, double z) {
  const double g = w.grad;
  return CharPoly{3, {1.0, -(w.x[0] + 2.0 * g * z), -(w.x[1] - g * z), -w.x[2]}, z, false};
}

Complex evaluate(const CharPoly& p, Complex lambda) {
  Complex acc = 0.0;
  for (double c : p.coeffs) acc = acc * lambda + c;
  return acc;
}

namespace {

Complex evaluate_derivative(const CharPoly& p, Complex lambda) {
  Complex acc = 0.0;
  const int deg = p.degree;
  for (int i = 0; i < deg; ++i) acc = acc * lambda + static_cast<double>(deg - i) * p.coeffs[static_cast<std::size_t>(i)];
  return acc;
}

// Roots of lambda^2 + b lambda + c.
std::vector<Complex> monic_quadratic(double b, double c) {
  const double disc = b * b - 4.0 * c;
  if (disc >= 0.0) {
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q == 0.0) return {Complex(0.0), Complex(0.0)};
    return {Complex(q), Complex(c / q)};
  }
  const double re = -0.5 * b;
  const double im = 0.5 * std::sqrt(-disc);
  return {Complex(re, im), Complex(re, -im)};
}

void sort_by_modulus(std::vector<Complex>& r) {
  std::stable_sort(r.begin(), r.end(), [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });
}

double scale_of(const CharPoly& p, Complex lambda) {
  double s = 0.0;
  double pw = 1.0;
  const double m = std::abs(lambda);
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
    s += std::abs(*it) * pw;
    pw *= m;
  }
  return s;
}

// A few Newton steps, kept only while the residual shrinks.
Complex polish(const CharPoly& p, Complex r) {
  double res = std::abs(evaluate(p, r));
  for (int it = 0; it < 4 && res > 0.0; ++it) {
    const Complex d = evaluate_derivative(p, r);
    if (d == Complex(0.0)) break;
    const Complex cand = r - evaluate(p, r) / d;
    const double cres = std::abs(evaluate(p, cand));
    if (!(cres < res)) break;
    r = cand;
    res = cres;
  }
  return r;
}

bool residuals_ok(const CharPoly& p, const std::vector<Complex>& roots) {
  for (Complex r : roots) {
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) return false;
    if (std::abs(evaluate(p, r)) > 1e-9 * scale_of(p, r)) return false;
  }
  return true;
}

// Deflate the cubic by the real root r and solve the remaining quadratic.
std::vector<Complex> deflate_and_solve(const CharPoly& p, double r) {
  const double a = p.coeffs[1];
  const double b = p.coeffs[2];
  const double q1 = a + r;
  const double q0 = b + q1 * r;
  std::vector<Complex> out = monic_quadratic(q1, q0);
  out.insert(out.begin(), Complex(r));
  return out;
}

}  // namespace

std::vector<Complex> cubic_roots_closed_form(const CharPoly& p) {
  const double a = p.coeffs[1];
  const double b = p.coeffs[2];
  const double c = p.coeffs[3];
  // lambda = t - a/3 gives t^3 + P t + Q.
  const double shift = a / 3.0;
  const double P = b - a * a / 3.0;
  const double Q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = 0.25 * Q * Q + P * P * P / 27.0;

  std::vector<Complex> roots;
  if (disc > 0.0) {
    const double u = std::cbrt(-0.5 * Q - std::copysign(std::sqrt(disc), Q));
    const double t = u == 0.0 ? 0.0 : u - P / (3.0 * u);
    roots = deflate_and_solve(p, t - shift);
  } else if (P == 0.0) {
    roots = {Complex(-shift), Complex(-shift), Complex(-shift)};
  } else {
    const double m = 2.0 * std::sqrt(-P / 3.0);
    const double arg = std::clamp(3.0 * Q / (P * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      roots.emplace_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift);
  }
  for (Complex& r : roots) {
    const Complex polished = polish(p, r);
    r = r.imag() == 0.0 ? Complex(polished.real()) : polished;
  }
  sort_by_modulus(roots);
  return roots;
}

std::vector<Complex> cubic_roots_bracketing(const CharPoly& p) {
  // Cauchy bound on the real root; the cubic changes sign over [-B, B].
  double B = 1.0;
  for (std::size_t i = 1; i < p.coeffs.size(); ++i) B = std::max(B, 1.0 + std::abs(p.coeffs[i]));
  double lo = -B, hi = B;
  double flo = evaluate(p, lo).real();
  for (int it = 0; it < 200 && hi - lo > 1e-15 * B; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = evaluate(p, mid).real();
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  std::vector<Complex> roots = deflate_and_solve(p, polish(p, 0.5 * (lo + hi)).real());
  for (std::size_t i = 1; i < roots.size(); ++i) {
    const Complex polished = polish(p, roots[i]);
    roots[i] = roots[i].imag() == 0.0 ? Complex(polished.real()) : polished;
  }
  sort_by_modulus(roots);
  return roots;
}

std::vector<Complex> poly_roots(const CharPoly& p) {
  if (p.coeffs.size() != static_cast<std::size_t>(p.degree) + 1 || p.coeffs.empty() || p.coeffs[0] != 1.0)
    throw PreconditionError("poly_roots: polynomial must be monic with degree + 1 coefficients");
  for (double c : p.coeffs)
    if (!std::isfinite(c)) throw PreconditionError("poly_roots: non-finite coefficient");
  std::vector<Complex> roots;
  switch (p.degree) {
    case 1:
      roots = {Complex(-p.coeffs[1])};
      break;
    case 2:
      roots = monic_quadratic(p.coeffs[1], p.coeffs[2]);
      break;
    case 3:
      if (p.sag_factored) {
        const auto q = sag_quadratic_factor(p.z);
        roots = monic_quadratic(q[1], q[2]);
        roots.emplace_back(0.5);
      } else {
        roots = cubic_roots_closed_form(p);
        if (!residuals_ok(p, roots)) roots = cubic_roots_bracketing(p);
      }
      break;
    default:
      throw PreconditionError("poly_roots: only degrees 1 to 3 are supported");
  }
  sort_by_modulus(roots);
  return roots;
}

double max_root_modulus(const CharPoly& p) {
  const auto r = poly_roots(p);
  return std::abs(r.front());
}

bool is_absolutely_stable(const CharPoly& p, double tol) {
  if (!(tol > 0.0) || tol > 1e-6) throw PreconditionError("is_absolutely_stable: tol must lie in (0, 1e-6]");
  if (p.z == 0.0) return true;
  const auto roots = poly_roots(p);
  const double sep = std::sqrt(tol);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double m = std::abs(roots[i]);
    if (m > 1.0 + tol) return false;
    if (m < 1.0 - tol) continue;
    for (std::size_t j = 0; j < roots.size(); ++j)
      if (j != i && std::abs(roots[i] - roots[j]) <= sep) return false;
  }
  return true;
}

}  // namespace sagopt::stability

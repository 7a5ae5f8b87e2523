#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

#include "sagopt/errors.hpp"
#include "sagopt/rational.hpp"

namespace sagopt {

// The two discrete schemes under study.
enum class Scheme { nag, sag };

inline std::string_view to_string(Scheme s) { return s == Scheme::nag ? "nag" : "sag"; }
inline std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "nag") return Scheme::nag;
  if (name == "sag") return Scheme::sag;
  return std::nullopt;
}

// Coefficients of the four-term recurrence
//   sum_i (alpha_i + beta_i / n + gamma_i / n^2) x_{n+2-i} = -h^2 grad F(.)
// for i = 1..4, parameterized by (k, m1, m2). T is double or Rational.
template <class T>
struct SchemeCoefficientsT {
  std::array<T, 4> alpha{};
  std::array<T, 4> beta{};
  std::array<T, 4> gamma{};
  T k_param{};
  T m1{};
  T m2{};
};

using SchemeCoefficients = SchemeCoefficientsT<double>;
using ExactSchemeCoefficients = SchemeCoefficientsT<Rational>;

template <class T>
SchemeCoefficientsT<T> scheme_coefficients_t(T k, T m1, T m2) {
  const T half = T(1) / T(2);
  SchemeCoefficientsT<T> c;
  c.alpha = {T(2), T(-5), T(4), T(-1)};
  c.beta = {T(9) * half - k, T(-6) + T(3) * k, T(3) * half - T(3) * k, k};
  c.gamma = {m1, -(T(3) * m1 + m2 + T(3)) * half, m2, (m1 - m2 + T(3)) * half};
  c.k_param = k;
  c.m1 = m1;
  c.m2 = m2;
  return c;
}

inline SchemeCoefficients scheme_coefficients(double k, double m1, double m2) {
  return scheme_coefficients_t<double>(k, m1, m2);
}

inline ExactSchemeCoefficients scheme_coefficients_exact(Rational k, Rational m1, Rational m2) {
  return scheme_coefficients_t<Rational>(k, m1, m2);
}

// Explicit form x_{n+1} = x[0] x_n + x[1] x_{n-1} + x[2] x_{n-2} + grad * h^2 grad F(.).
template <class T>
struct RecurrenceWeights {
  std::array<T, 3> x{};
  T grad{};
};

namespace detail {
template <class T>
bool is_zero(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return v.is_zero();
  } else {
    return v == T(0);
  }
}
}  // namespace detail

// Divides the recurrence at index n through by the x_{n+1} coefficient.
template <class T>
RecurrenceWeights<T> normalized_recurrence(const SchemeCoefficientsT<T>& c, long n) {
  if (n < 2) throw PreconditionError("normalized_recurrence: n must be >= 2");
  const T tn(static_cast<std::int64_t>(n));
  const T n2 = tn * tn;
  std::array<T, 4> w{};
  for (int i = 0; i < 4; ++i) w[i] = c.alpha[i] * n2 + c.beta[i] * tn + c.gamma[i];
  if (detail::is_zero(w[0]))
    throw DegenerateSchemeError("normalized_recurrence: leading coefficient vanishes at n = " +
                                std::to_string(n));
  RecurrenceWeights<T> r;
  for (int i = 0; i < 3; ++i) r.x[i] = -w[i + 1] / w[0];
  r.grad = -n2 / w[0];
  return r;
}

// n -> infinity limit of normalized_recurrence: only the alpha terms survive.
template <class T>
RecurrenceWeights<T> limit_recurrence(const SchemeCoefficientsT<T>& c) {
  if (detail::is_zero(c.alpha[0]))
    throw DegenerateSchemeError("limit_recurrence: leading alpha vanishes");
  RecurrenceWeights<T> r;
  for (int i = 0; i < 3; ++i) r.x[i] = -c.alpha[i + 1] / c.alpha[0];
  r.grad = T(-1) / c.alpha[0];
  return r;
}

// Closed-form SAG weights at index n:
// ((10n^2+9n+6)/(4n^2+8n), -(4n^2+3)/(2n^2+4n), (2n-1)/(4n+8), -n/(2n+4)).
inline RecurrenceWeights<Rational> sag_closed_form_weights(long n) {
  const std::int64_t k = n;
  RecurrenceWeights<Rational> r;
  r.x[0] = Rational(10 * k * k + 9 * k + 6, 4 * k * k + 8 * k);
  r.x[1] = -Rational(4 * k * k + 3, 2 * k * k + 4 * k);
  r.x[2] = Rational(2 * k - 1, 4 * k + 8);
  r.grad = -Rational(k, 2 * k + 4);
  return r;
}

}  // namespace sagopt

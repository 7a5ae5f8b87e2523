#include "sagopt/lemma.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sagopt/errors.hpp"

namespace sagopt::ode {

Mat2 mat2_mul(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

Mat2 mat2_identity() { return Mat2{{{1.0, 0.0}, {0.0, 1.0}}}; }

double mat2_max_abs_diff(const Mat2& a, const Mat2& b) {
  double m = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

double spectral_norm(const Mat2& m) {
  // Gram G = M^T M = [[p, q], [q, r]]; lambda_max = (p + r)/2 + sqrt(((p - r)/2)^2 + q^2).
  const double p = m[0][0] * m[0][0] + m[1][0] * m[1][0];
  const double r = m[0][1] * m[0][1] + m[1][1] * m[1][1];
  const double q = m[0][0] * m[0][1] + m[1][0] * m[1][1];
  const double half = 0.5 * (p - r);
  return std::sqrt(0.5 * (p + r) + std::hypot(half, q));
}

Mat2 lemma_c(long n) {
  const double dn = static_cast<double>(n);
  return Mat2{{{(2.0 * dn - 1.0) / (dn + 1.0), -(dn - 2.0) / (dn + 1.0)}, {1.0, 0.0}}};
}

LemmaMatrices lemma_matrices(long n) {
  if (n < 2) throw PreconditionError("lemma_matrices: n must be >= 2");
  LemmaMatrices lm;
  lm.n = n;
  lm.C = lemma_c(n);
  lm.D.push_back(mat2_identity());
  for (long l = 1; l <= n + 1; ++l) lm.D.push_back(mat2_mul(lm.D.back(), lemma_c(n - l + 1)));
  for (const Mat2& d : lm.D) lm.norms.push_back(spectral_norm(d));
  return lm;
}

Mat2 lemma_d_direct(long n, long l) {
  if (l < 0 || l > n + 1) throw PreconditionError("lemma_d_direct: l must lie in [0, n+1]");
  // Right-to-left accumulation, the opposite association of lemma_matrices.
  Mat2 d = mat2_identity();
  for (long m = n - l + 1; m <= n; ++m) d = mat2_mul(lemma_c(m), d);
  return d;
}

LemmaBoundsReport verify_lemma_bounds(long n_max) {
  if (n_max < 4) throw PreconditionError("verify_lemma_bounds: n_max must be >= 4");
  const Mat2 p{{{1.0, 1.0}, {1.0, 0.0}}};
  const Mat2 p_inv{{{0.0, 1.0}, {1.0, -1.0}}};
  const Mat2 f_nm1{{{1.0, 0.0}, {1.0, 0.0}}};
  const Mat2 f_n{{{0.5, 0.5}, {0.5, 0.5}}};
  const Mat2 f_np1{{{0.0, 1.0}, {0.0, 1.0}}};

  LemmaBoundsReport rep;
  rep.n_max = n_max;
  rep.m3_is_sqrt2 = true;
  for (long n = 2; n <= n_max; ++n) {
    const LemmaMatrices lm = lemma_matrices(n);
    const auto idx = [](long l) { return static_cast<std::size_t>(l); };
    rep.closed_form_error = std::max({rep.closed_form_error, mat2_max_abs_diff(lm.D[idx(n - 1)], f_nm1),
                                      mat2_max_abs_diff(lm.D[idx(n)], f_n),
                                      mat2_max_abs_diff(lm.D[idx(n + 1)], f_np1)});
    double sup = 0.0;
    for (long l = 0; l <= n + 1; ++l) {
      sup = std::max(sup, lm.norms[idx(l)]);
      rep.recursion_error = std::max(rep.recursion_error, mat2_max_abs_diff(lm.D[idx(l)], lemma_d_direct(n, l)));
      if (l <= n) {
        const Mat2 next = mat2_mul(lm.D[idx(l)], lemma_c(n - l));
        rep.recursion_error = std::max(rep.recursion_error, mat2_max_abs_diff(lm.D[idx(l + 1)], next));
      }
      if (l > 0 && l <= n - 2) {
        const Mat2 tilde = mat2_mul(mat2_mul(p_inv, lm.D[idx(l)]), p);
        rep.tilde_ratio = std::max(rep.tilde_ratio, spectral_norm(tilde) / static_cast<double>(n + 2));
        rep.tilde_lower_left = std::max(rep.tilde_lower_left, std::abs(tilde[1][0]));
      }
    }
    rep.sup_ratio.push_back(sup / static_cast<double>(n));
    rep.M = std::max(rep.M, sup / static_cast<double>(n));
    const double m3 = lm.norms[idx(n + 1)];
    rep.M3 = std::max(rep.M3, m3);
    if (std::abs(m3 - std::sqrt(2.0)) > 1e-12) rep.m3_is_sqrt2 = false;
  }
  rep.ok = std::isfinite(rep.M) && std::isfinite(rep.M3) && rep.m3_is_sqrt2 && rep.closed_form_error <= 1e-12 &&
           rep.recursion_error <= 1e-12 && rep.tilde_ratio <= 1.0 + 1e-12;
  return rep;
}

bool check_discrete_gronwall(std::span<const double> eta, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw PreconditionError("check_discrete_gronwall: alpha and beta must be positive");
  if (eta.empty()) return true;
  double partial = 0.0;  // sum_{i<n} eta_i
  for (std::size_t n = 0; n < eta.size(); ++n) {
    if (n >= 1) {
      const double bound = beta + alpha * partial;
      if (eta[n] > bound * (1.0 + 1e-12))
        throw PreconditionError("check_discrete_gronwall: hypothesis fails at index " + std::to_string(n), n);
    }
    partial += eta[n];
  }
  const double base = beta + alpha * eta.front();
  for (std::size_t n = 1; n < eta.size(); ++n) {
    const double bound = std::exp(alpha * static_cast<double>(n)) * base;
    if (eta[n] > bound * (1.0 + 1e-12)) return false;
  }
  return true;
}

}  // namespace sagopt::ode

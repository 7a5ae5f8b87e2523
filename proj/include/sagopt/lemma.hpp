#pragma once

#include <array>
#include <span>
#include <vector>

namespace sagopt::ode {

using Mat2 = std::array<std::array<double, 2>, 2>;

Mat2 mat2_mul(const Mat2& a, const Mat2& b);
Mat2 mat2_identity();
double mat2_max_abs_diff(const Mat2& a, const Mat2& b);
// Largest singular value, from the closed-form eigenvalues of the 2x2 Gram matrix.
double spectral_norm(const Mat2& m);

// C_n = [[(2n-1)/(n+1), -(n-2)/(n+1)], [1, 0]].
Mat2 lemma_c(long n);

struct LemmaMatrices {
  long n = 0;
  Mat2 C{};
  std::vector<Mat2> D;  // D[l] = C_n C_{n-1} ... C_{n-l+1}, l = 0..n+1
  std::vector<double> norms;
};

// Requires n >= 2.
LemmaMatrices lemma_matrices(long n);
// D_{n,l} by multiplying the factors from scratch (no reuse of D_{n,l-1}).
Mat2 lemma_d_direct(long n, long l);

struct LemmaBoundsReport {
  long n_max = 0;
  double M = 0.0;   // max over n of sup_l ||D_{n,l}|| / n
  double M3 = 0.0;  // max over n of ||D_{n,n+1}||
  std::vector<double> sup_ratio;  // sup_l ||D_{n,l}|| / n for n = 2..n_max
  double closed_form_error = 0.0;  // max deviation of D_{n,n-1}, D_{n,n}, D_{n,n+1} from closed forms
  double recursion_error = 0.0;    // max |D_{n,l+1} - D_{n,l} C_{n-l}| and from-scratch deviation
  double tilde_ratio = 0.0;        // max ||P^{-1} D P|| / (n+2) over 0 < l <= n-2
  double tilde_lower_left = 0.0;   // max |(P^{-1} D P)_{21}| over the same range
  bool m3_is_sqrt2 = false;
  bool ok = false;
};

// Requires n_max >= 4.
LemmaBoundsReport verify_lemma_bounds(long n_max);

// Checks eta_n <= exp(alpha n) (beta + alpha eta_0) for every n >= 1 after
// confirming the hypothesis eta_n <= beta + alpha sum_{i<n} eta_i for n >= 1
// (with 1e-12 relative slack). Throws PreconditionError naming the first index
// where the hypothesis fails.
bool check_discrete_gronwall(std::span<const double> eta, double alpha, double beta);

}  // namespace sagopt::ode

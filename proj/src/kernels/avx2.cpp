// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "sagopt/kernels.hpp"

namespace sagopt::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  __m256d a2 = _mm256_setzero_pd();
  __m256d a3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
    a2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), a2);
    a3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), a3);
  }
  for (; i + 4 <= n; i += 4) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
  }
  double acc = hsum(_mm256_add_pd(_mm256_add_pd(a0, a1), _mm256_add_pd(a2, a3)));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

Dot3 dot3_avx2(const double* x, const double* y, std::size_t n) {
  __m256d xx0 = _mm256_setzero_pd(), xx1 = _mm256_setzero_pd();
  __m256d yy0 = _mm256_setzero_pd(), yy1 = _mm256_setzero_pd();
  __m256d xy0 = _mm256_setzero_pd(), xy1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d xv0 = _mm256_loadu_pd(x + i);
    const __m256d yv0 = _mm256_loadu_pd(y + i);
    const __m256d xv1 = _mm256_loadu_pd(x + i + 4);
    const __m256d yv1 = _mm256_loadu_pd(y + i + 4);
    xx0 = _mm256_fmadd_pd(xv0, xv0, xx0);
    yy0 = _mm256_fmadd_pd(yv0, yv0, yy0);
    xy0 = _mm256_fmadd_pd(xv0, yv0, xy0);
    xx1 = _mm256_fmadd_pd(xv1, xv1, xx1);
    yy1 = _mm256_fmadd_pd(yv1, yv1, yy1);
    xy1 = _mm256_fmadd_pd(xv1, yv1, xy1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    xx0 = _mm256_fmadd_pd(xv, xv, xx0);
    yy0 = _mm256_fmadd_pd(yv, yv, yy0);
    xy0 = _mm256_fmadd_pd(xv, yv, xy0);
  }
  Dot3 r{hsum(_mm256_add_pd(xx0, xx1)), hsum(_mm256_add_pd(yy0, yy1)), hsum(_mm256_add_pd(xy0, xy1))};
  for (; i < n; ++i) {
    r.xx += x[i] * x[i];
    r.yy += y[i] * y[i];
    r.xy += x[i] * y[i];
  }
  return r;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void lincomb2_avx2(double a, const double* x, double b, const double* y, double* out,
                   std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(bv, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), t));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void lincomb3_avx2(double a, const double* x, double b, const double* y, double c,
                   const double* w, double* out, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const __m256d bv = _mm256_set1_pd(b);
  const __m256d cv = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(cv, _mm256_loadu_pd(w + i));
    t = _mm256_fmadd_pd(bv, _mm256_loadu_pd(y + i), t);
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), t));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i] + c * w[i];
}

void rotate_avx2(double* x, double* y, double c, double s, std::size_t n) {
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_fmsub_pd(cv, xv, _mm256_mul_pd(sv, yv)));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(sv, xv, _mm256_mul_pd(cv, yv)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

double masked_residual_avx2(const double* w, const double* x, const double* m, double* out,
                            std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_mul_pd(_mm256_loadu_pd(w + i),
                                    _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(m + i)));
    _mm256_storeu_pd(out + i, r);
    acc = _mm256_fmadd_pd(r, r, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double r = w[i] * (x[i] - m[i]);
    out[i] = r;
    total += r * r;
  }
  return total;
}

void dot4_avx2(const double* x, const double* const* y, std::size_t n, double* out) {
  const double* y0 = y[0];
  const double* y1 = y[1];
  const double* y2 = y[2];
  const double* y3 = y[3];
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  __m256d a2 = _mm256_setzero_pd();
  __m256d a3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    a0 = _mm256_fmadd_pd(xv, _mm256_loadu_pd(y0 + i), a0);
    a1 = _mm256_fmadd_pd(xv, _mm256_loadu_pd(y1 + i), a1);
    a2 = _mm256_fmadd_pd(xv, _mm256_loadu_pd(y2 + i), a2);
    a3 = _mm256_fmadd_pd(xv, _mm256_loadu_pd(y3 + i), a3);
  }
  out[0] = hsum(a0);
  out[1] = hsum(a1);
  out[2] = hsum(a2);
  out[3] = hsum(a3);
  for (; i < n; ++i) {
    out[0] += x[i] * y0[i];
    out[1] += x[i] * y1[i];
    out[2] += x[i] * y2[i];
    out[3] += x[i] * y3[i];
  }
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{
      "avx2",        dot_avx2,      dot3_avx2,   axpy_avx2,
      lincomb2_avx2, lincomb3_avx2, rotate_avx2, masked_residual_avx2,
      dot4_avx2,
  };
  return table;
}

}  // namespace sagopt::kernels

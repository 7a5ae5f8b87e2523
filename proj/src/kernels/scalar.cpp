#include "sagopt/kernels.hpp"

namespace sagopt::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

Dot3 dot3_scalar(const double* x, const double* y, std::size_t n) {
  Dot3 r;
  for (std::size_t i = 0; i < n; ++i) {
    r.xx += x[i] * x[i];
    r.yy += y[i] * y[i];
    r.xy += x[i] * y[i];
  }
  return r;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void lincomb2_scalar(double a, const double* x, double b, const double* y, double* out,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void lincomb3_scalar(double a, const double* x, double b, const double* y, double c,
                     const double* w, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i] + c * w[i];
}

void rotate_scalar(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

double masked_residual_scalar(const double* w, const double* x, const double* m, double* out,
                              std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = w[i] * (x[i] - m[i]);
    out[i] = r;
    acc += r * r;
  }
  return acc;
}

void dot4_scalar(const double* x, const double* const* y, std::size_t n, double* out) {
  for (int r = 0; r < 4; ++r) out[r] = dot_scalar(x, y[r], n);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar",        dot_scalar,      dot3_scalar,   axpy_scalar,
      lincomb2_scalar, lincomb3_scalar, rotate_scalar, masked_residual_scalar,
      dot4_scalar,
  };
  return table;
}

}  // namespace sagopt::kernels

#pragma once

// Dense double-precision inner loops used by the steppers, the ODE oracle and
// the SVD. Each kernel has a scalar reference implementation and, on x86-64,
// an AVX2/FMA variant. The active table is chosen once at first use from the
// CPU features; setting SAGOPT_KERNELS=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace sagopt::kernels {

struct Dot3 {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
};

struct KernelTable {
  std::string_view name;
  double (*dot)(const double* x, const double* y, std::size_t n);
  Dot3 (*dot3)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out = a * x + b * y
  void (*lincomb2)(double a, const double* x, double b, const double* y, double* out,
                   std::size_t n);
  // out = a * x + b * y + c * w
  void (*lincomb3)(double a, const double* x, double b, const double* y, double c,
                   const double* w, double* out, std::size_t n);
  // (x, y) <- (c x - s y, s x + c y)
  void (*rotate)(double* x, double* y, double c, double s, std::size_t n);
  // out = w * (x - m); returns sum(out^2)
  double (*masked_residual)(const double* w, const double* x, const double* m, double* out,
                            std::size_t n);
  // out[r] = <x, y[r]> for r = 0..3
  void (*dot4)(const double* x, const double* const* y, std::size_t n, double* out);
};

const KernelTable& scalar_table();
// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();
const KernelTable& active();

// Convenience wrappers over active(). Lengths must match; checked in debug builds.
double dot(std::span<const double> x, std::span<const double> y);
Dot3 dot3(std::span<const double> x, std::span<const double> y);
// out[r] = <x, y[r]>; every y[r] has x.size() entries.
void dot4(std::span<const double> x, const double* const* y, double* out);
double sumsq(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void lincomb2(double a, std::span<const double> x, double b, std::span<const double> y,
              std::span<double> out);
void lincomb3(double a, std::span<const double> x, double b, std::span<const double> y,
              double c, std::span<const double> w, std::span<double> out);
void rotate(std::span<double> x, std::span<double> y, double c, double s);
double masked_residual(std::span<const double> w, std::span<const double> x,
                       std::span<const double> m, std::span<double> out);

}  // namespace sagopt::kernels

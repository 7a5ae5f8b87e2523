#include <cassert>
#include <cstdlib>
#include <string_view>

#include "sagopt/kernels.hpp"

namespace sagopt::kernels {

#if SAGOPT_HAVE_AVX2
const KernelTable& avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if SAGOPT_HAVE_AVX2
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = []() -> const KernelTable& {
    if (const char* env = std::getenv("SAGOPT_KERNELS")) {
      if (std::string_view(env) == "scalar") return scalar_table();
    }
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return table;
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot(x.data(), y.data(), x.size());
}

Dot3 dot3(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot3(x.data(), y.data(), x.size());
}

void dot4(std::span<const double> x, const double* const* y, double* out) {
  active().dot4(x.data(), y, x.size(), out);
}

double sumsq(std::span<const double> x) { return active().dot(x.data(), x.data(), x.size()); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(a, x.data(), y.data(), x.size());
}

void lincomb2(double a, std::span<const double> x, double b, std::span<const double> y,
              std::span<double> out) {
  assert(x.size() == y.size() && x.size() == out.size());
  active().lincomb2(a, x.data(), b, y.data(), out.data(), x.size());
}

void lincomb3(double a, std::span<const double> x, double b, std::span<const double> y,
              double c, std::span<const double> w, std::span<double> out) {
  assert(x.size() == y.size() && x.size() == w.size() && x.size() == out.size());
  active().lincomb3(a, x.data(), b, y.data(), c, w.data(), out.data(), x.size());
}

void rotate(std::span<double> x, std::span<double> y, double c, double s) {
  assert(x.size() == y.size());
  active().rotate(x.data(), y.data(), c, s, x.size());
}

double masked_residual(std::span<const double> w, std::span<const double> x,
                       std::span<const double> m, std::span<double> out) {
  assert(w.size() == x.size() && x.size() == m.size() && x.size() == out.size());
  return active().masked_residual(w.data(), x.data(), m.data(), out.data(), x.size());
}

}  // namespace sagopt::kernels

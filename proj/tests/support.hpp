#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sagopt/bench/rng.hpp"
#include "sagopt/completion.hpp"
#include "sagopt/matrix.hpp"

namespace testing {

inline sagopt::Matrix random_matrix(sagopt::bench::SplitMix64& rng, std::size_t r, std::size_t c,
                                    double scale = 1.0) {
  sagopt::Matrix m(r, c);
  for (double& v : m.flat()) v = scale * rng.gaussian();
  return m;
}

inline std::vector<double> random_vec(sagopt::bench::SplitMix64& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& e : v) e = rng.gaussian();
  return v;
}

// Power series of the Bessel function J1.
inline double bessel_j1(double t) {
  double term = t / 2.0;
  double sum = term;
  for (int m = 1; m < 60; ++m) {
    term *= -(t * t / 4.0) / (static_cast<double>(m) * static_cast<double>(m + 1));
    sum += term;
  }
  return sum;
}

// Exact solution of x'' + (3/t) x' + x = 0, x(0) = 1, x'(0) = 0.
inline double bessel_oracle(double t) { return t == 0.0 ? 1.0 : 2.0 * bessel_j1(t) / t; }

inline std::vector<sagopt::mc::Entry> full_mask(std::size_t rows, std::size_t cols) {
  std::vector<sagopt::mc::Entry> mask;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) mask.emplace_back(i, j);
  return mask;
}

// A small completion instance: rank-r truth observed on a random half of the entries.
inline sagopt::mc::CompletionProblem small_problem(std::uint64_t seed, std::size_t n = 24, std::size_t rank = 2,
                                                   double lambda = 0.5) {
  sagopt::bench::SplitMix64 rng(seed);
  const sagopt::Matrix a = random_matrix(rng, n, rank);
  const sagopt::Matrix b = random_matrix(rng, n, rank);
  const sagopt::Matrix m = sagopt::matmul(a, b.transposed());
  std::vector<sagopt::mc::Entry> mask;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (rng.uniform() < 0.5) mask.emplace_back(i, j);
  return sagopt::mc::CompletionProblem::from_matrix(m, mask, lambda);
}

inline std::filesystem::path temp_dir() {
  std::filesystem::path p(SAGOPT_TEST_TMP);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing

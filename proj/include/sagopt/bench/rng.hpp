#pragma once

#include <cstdint>
#include <optional>

namespace sagopt::bench {

// SplitMix64 with Gaussian variates from the Marsaglia polar method. The
// stream is fully specified: next() advances the state by 0x9E3779B97F4A7C15
// and applies the standard finalizer; uniform() keeps the top 53 bits.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // [0, 1)
  double uniform();
  // Uniform integer in [0, n); rejection sampling, no modulo bias. n > 0.
  std::uint64_t below(std::uint64_t n);
  // Standard normal. Pairs are generated together; the second is cached.
  double gaussian();
  // Independent child stream seeded from this one.
  SplitMix64 split() { return SplitMix64(next()); }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
  std::optional<double> spare_;
};

}  // namespace sagopt::bench

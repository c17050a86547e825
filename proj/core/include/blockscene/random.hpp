#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace blockscene {

/// SplitMix64 step; used to expand seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** (Blackman & Vigna) seeded through SplitMix64.
///
/// The distributions below are implemented here rather than taken from
/// <random>, whose distributions are implementation-defined, so a seed
/// produces the same stream with any standard library.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform01() < p; }
  /// Marsaglia polar method; one variate per call, no cached spare.
  double normal(double mean = 0.0, double sigma = 1.0);

  /// Independent child stream derived from this generator's next output.
  Rng split();

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace blockscene

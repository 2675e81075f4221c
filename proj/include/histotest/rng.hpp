#pragma once

#include <cstdint>
#include <limits>

namespace histotest {

/// Counter-based 64-bit generator: output i is a SplitMix64 finalization of
/// (key + i * golden). Two streams with the same seed produce the same
/// sequence; the stream can be copied to replay it.
///
/// Satisfies UniformRandomBitGenerator, so it plugs into <random>
/// distributions directly.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed) noexcept : seed_(seed), key_(mix(seed)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    return mix(key_ + (counter_++) * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    for (;;) {
      const unsigned __int128 wide = static_cast<unsigned __int128>((*this)()) * bound;
      const auto low = static_cast<std::uint64_t>(wide);
      if (low >= (-bound) % bound) return static_cast<std::uint64_t>(wide >> 64);
    }
  }

  /// Independent child stream seeded from this stream's next output.
  RngStream fork() noexcept { return RngStream((*this)()); }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Seed for trial `index` of an experiment with base seed `base`.
constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return base ^ index;
}

}  // namespace histotest

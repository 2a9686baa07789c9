#pragma once

#include <cmath>
#include <cstdint>

namespace sqsd {

/// Counter-based 64-bit generator. Output n of stream `key` is
/// mix(key + (n + 1) * golden), the SplitMix64 finalizer applied to a Weyl
/// sequence, so any (key, n) is addressable without sequential state and
/// substreams for different keys are independent of execution order.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  /// Substream derived from (seed, stream index), e.g. one per episode.
  static CounterRng substream(std::uint64_t seed, std::uint64_t index) noexcept {
    return CounterRng(mix(seed ^ mix(index + kGolden)));
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Exponential(1) variate; used for uniform Dirichlet sampling.
  double exponential() noexcept { return -std::log1p(-uniform()); }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sqsd

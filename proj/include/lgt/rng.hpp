#pragma once

#include <array>
#include <cstdint>

namespace lgt {

namespace detail {

// SplitMix64 finalizer; full-avalanche 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based random stream: output = hash(key, counter).
///
/// Streams with distinct keys are statistically independent, and drawing
/// advances only the local counter, so the stream for any (sweep, link)
/// pair can be reconstructed from scratch without shared state. This is
/// what makes sweeps reproducible regardless of worker count.
class RandomStream {
 public:
  RandomStream() = default;

  RandomStream(std::array<std::uint64_t, 2> key,
               std::array<std::uint64_t, 2> counter)
      : key_(key), counter_(counter) {}

  /// Derive a stream from a seed and up to three decorrelation indices
  /// (typically sweep index, link ordinal, purpose tag).
  static RandomStream keyed(std::uint64_t seed, std::uint64_t a = 0,
                            std::uint64_t b = 0, std::uint64_t c = 0) {
    std::array<std::uint64_t, 2> key{};
    key[0] = detail::mix64(detail::mix64(seed) ^ detail::mix64(a ^ 0x5851F42D4C957F2DULL));
    key[1] = detail::mix64(detail::mix64(seed ^ 0xDA942042E4DD58B5ULL) ^ detail::mix64(b));
    std::array<std::uint64_t, 2> counter{};
    counter[0] = 0;
    counter[1] = detail::mix64(c);
    return RandomStream(key, counter);
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (counter_[0]++) * 0xA0761D6478BD642FULL;
    z = detail::mix64(z ^ key_[0]);
    z = detail::mix64(z ^ key_[1] ^ counter_[1]);
    return z;
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the second deviate is cached.
  double normal();

  std::array<std::uint64_t, 2> key() const { return key_; }
  std::array<std::uint64_t, 2> counter() const { return counter_; }

 private:
  std::array<std::uint64_t, 2> key_{{0, 0}};
  std::array<std::uint64_t, 2> counter_{{0, 0}};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lgt

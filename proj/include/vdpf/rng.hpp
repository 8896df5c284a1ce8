#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace vdpf {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seeded random stream. The engine is mt19937_64 (output fully specified by the
/// standard) and all variates are derived here rather than through <random>
/// distributions, so sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  /// Independent child stream keyed by (seed, a, b). Does not advance this stream.
  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return Rng(splitmix64(splitmix64(seed ^ splitmix64(a)) ^ splitmix64(b + 0x632BE59BD9B4E019ULL)));
  }

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  /// Standard exponential variate.
  double exponential();

  /// Index drawn with probability weights[i] / total. Never returns an index whose
  /// weight is zero. `total` must be positive and equal to the sum of weights.
  std::size_t categorical(std::span<const double> weights, double total);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace vdpf

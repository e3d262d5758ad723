#pragma once

#include <cmath>
#include <cstdint>

namespace recapc {

// SplitMix64 (Steele, Lea & Flood). Used instead of the <random> engines so
// that a given seed reproduces the exact same stream on every platform and
// standard-library version; distribution code below is likewise pinned.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal draw via Box-Muller. Consumes exactly two uniforms per
  /// call; nothing is cached, so draw order is trivially reproducible.
  double normal() {
    double u = 1.0 - uniform();  // (0, 1]; keeps the log finite
    double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPi * v);
  }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::uint64_t state_;
};

/// Derives a child seed from (seed, index). Children for distinct indices are
/// statistically independent streams; used for per-session and per-repetition
/// seeding so work can be sharded or reordered without changing results.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (0xA0761D6478BD642Full + index * 0xE7037ED1A0B428DBull));
  return g.next();
}

}  // namespace recapc

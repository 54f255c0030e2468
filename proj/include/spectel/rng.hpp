#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace spectel {

/// Seeded 64-bit Mersenne Twister with portable variate conversions.
///
/// Uniform reals and bounded integers come straight from raw engine output;
/// a given seed yields the same stream on every standard library.
class Rng {
public:
  static constexpr std::string_view family = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  /// Uniform on {0, ..., bound - 1}; bound must be positive.
  std::uint64_t index(std::uint64_t bound) {
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r < limit) return r % bound;
    }
  }

  /// Standard exponential variate.
  double exponential();

private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

inline double Rng::exponential() {
  return -std::log(uniform_open());
}

} // namespace spectel

#pragma once

#include <cstdint>

namespace earid {

// SplitMix64 finalizer; bijective on 64-bit values.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Counter-based uniform generator. Value `index` of stream `seed` is
// mix64(seed + (index + 1) * kGoldenGamma). Pure integer arithmetic, so the
// output is identical on every platform; this is the reproducibility
// contract for everything random in this library (projection matrices,
// synthetic populations, noise draws).
constexpr std::uint64_t u64_at(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed + (index + 1) * kGoldenGamma);
}

// Derives an independent child seed from a parent seed and up to three
// labels. Labels are position-sensitive: derive_seed(s, 1, 0) and
// derive_seed(s, 0, 1) differ.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) noexcept {
  std::uint64_t s = mix64(seed + kGoldenGamma);
  s = mix64(s ^ mix64(a + 1));
  s = mix64(s ^ mix64(b + 2));
  s = mix64(s ^ mix64(c + 3));
  return s;
}

// Top 53 bits to a double in (0, 1); offset by half an ulp so 0 and 1 are
// both excluded (safe to feed into logs and inverse CDFs).
constexpr double unit_from_bits(std::uint64_t x) noexcept {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse of the standard normal CDF (Acklam's rational approximation,
// relative error < 1.2e-9). Fixed algorithm so that normal deviates are
// reproducible across implementations, unlike std::normal_distribution.
double inverse_normal_cdf(double p);

// Sequential view over a counter-based stream.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return u64_at(seed_, counter_++); }
  double next_unit() { return unit_from_bits(next_u64()); }
  double next_normal() { return inverse_normal_cdf(next_unit()); }

  // Uniform integer in [0, bound) by 128-bit multiply; bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace earid

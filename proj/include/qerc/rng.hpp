#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace qerc::rng {

inline constexpr double kPi = 3.14159265358979323846;

/// Seed for every stochastic construction in the library. Identical seeds
/// give bit-identical streams on a given platform.
struct RandomSeed {
  std::uint64_t value = 0;

  /// Derives an independent sub-seed (retry streams, per-realization seeds).
  [[nodiscard]] RandomSeed derive(std::uint64_t salt) const {
    std::uint64_t z = value ^ (0xD1B54A32D192ED03ull * (salt + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return RandomSeed{z ^ (z >> 31)};
  }

  [[nodiscard]] RandomSeed offset(std::uint64_t k) const { return RandomSeed{value + k}; }
};

/// SplitMix64: a counter-based 64-bit generator. Chosen over platform RNGs so
/// that sampled unitaries are reproducible across compilers and standard
/// libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(RandomSeed seed) : state_(seed.value) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1); endpoints are never produced, so
  /// log/tan transforms below are always finite.
  double next_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_open01(); }

  /// Integer in [0, n). Modulo bias is < n / 2^64, irrelevant here.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  /// Standard normal via the Box-Muller transform (cosine branch).
  double next_normal() {
    const double u1 = next_open01();
    const double u2 = next_open01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Standard complex normal: one Box-Muller pair per entry, real part from
  /// the cosine branch, imaginary from the sine branch.
  std::complex<double> next_complex_normal() {
    const double u1 = next_open01();
    const double u2 = next_open01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
  }

  /// Cauchy(0, gamma) via the inverse CDF: x = gamma * tan(pi * (u - 1/2)).
  double next_cauchy(double gamma) {
    return gamma * std::tan(kPi * (next_open01() - 0.5));
  }

 private:
  std::uint64_t state_;
};

}  // namespace qerc::rng

#pragma once

#include <cstdint>
#include <optional>

namespace mlpsens {

/// Independent streams derived from one user seed.
enum class RngPurpose : std::uint64_t {
  weight_init = 0x1,
  data = 0x2,
  noise = 0x3,
  jitter = 0x4,
};

/// xoshiro256** seeded through SplitMix64. Portable and bit-reproducible
/// across platforms, unlike the std:: distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, RngPurpose purpose);

  std::uint64_t next() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; the second deviate of each pair is cached.
  double normal() noexcept;

 private:
  std::uint64_t s_[4];
  std::optional<double> spare_;
};

}  // namespace mlpsens

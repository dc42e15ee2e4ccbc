#pragma once

#include <cstdint>
#include <random>

namespace emt {

/// Stateless child-seed derivation. The child for (seed, index) is the
/// SplitMix64 finalizer applied to seed + (index + 1) * 0x9E3779B97F4A7C15.
/// The golden-ratio increment is odd, so the pre-image is injective in the
/// index for a fixed seed, and the finalizer is a bijection on 64 bits:
/// distinct indices always give distinct children.
[[nodiscard]] std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index) noexcept;

/// Maps 64 random bits onto the open interval (0, 1) using the top 53 bits.
[[nodiscard]] inline double unit_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Sequential generator owned by a single run. Uniform draws avoid the
/// implementation-defined std::uniform_real_distribution.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  [[nodiscard]] double uniform() { return unit_open(engine_()); }
  [[nodiscard]] bool bernoulli(double p) { return uniform() < p; }
  [[nodiscard]] double normal() { return normal_(engine_); }
  [[nodiscard]] std::uint64_t poisson(double mean);
  [[nodiscard]] double exponential(double rate);

  engine_type& engine() noexcept { return engine_; }

 private:
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace emt

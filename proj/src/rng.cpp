#include "emt/rng.hpp"

#include <cmath>

namespace emt {

std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index) noexcept {
  std::uint64_t z = master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

double Rng::exponential(double rate) { return -std::log(uniform()) / rate; }

}  // namespace emt

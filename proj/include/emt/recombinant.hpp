#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emt/rng.hpp"

namespace emt::recombinant {

enum class Family { exponential, uniform, pareto, lognormal, weibull };

[[nodiscard]] std::string_view family_name(Family f) noexcept;
/// Throws ConfigError for names outside the supported set.
[[nodiscard]] Family parse_family(std::string_view name);

/// Continuous tail family with an analytic survival function and inverse.
///   exponential(rate)     p1 = rate
///   uniform(0, b)         p1 = b
///   pareto(xm, shape)     p1 = xm,    p2 = shape
///   lognormal(mu, sigma)  p1 = mu,    p2 = sigma
///   weibull(scale, shape) p1 = scale, p2 = shape
struct TailDistribution {
  Family family = Family::exponential;
  double p1 = 1.0;
  double p2 = 1.0;

  void validate() const;

  [[nodiscard]] double survival(double x) const;
  [[nodiscard]] double log_survival(double x) const;
  /// x with survival(x) == u, for u in (0, 1).
  [[nodiscard]] double inverse_survival(double u) const;
  [[nodiscard]] double sample(Rng& rng) const;
};

struct EvtRunConfig {
  std::uint64_t k_draws = 1000;
  std::uint64_t replicates = 2000;
  std::uint64_t seed = 0;
};

/// log2 of the number of subsets of A^phi accessible elements, i.e. A^phi.
[[nodiscard]] double log2_combinations(double a_stock, double phi_access);

/// For each replicate: K draws, Z = max, m = K * survival(Z). Replicate r
/// uses the stream derive_stream(seed, r); OpenMP over replicates. The
/// result is indexed by replicate, so it is independent of thread count.
[[nodiscard]] std::vector<double> draw_max_statistic(const TailDistribution& dist, const EvtRunConfig& cfg);

/// Single-threaded reference; bit-identical to draw_max_statistic.
[[nodiscard]] std::vector<double> draw_max_statistic_serial(const TailDistribution& dist,
                                                            const EvtRunConfig& cfg);

/// Idea quality at the frontier: inverse_survival(eps_exp / k_draws).
[[nodiscard]] double quantile_frontier(const TailDistribution& dist, double k_draws, double eps_exp);

struct EvtDiagnostics {
  double mean = 0.0;
  double ks_distance = 0.0;
  bool pass = false;
};

/// Sample mean and one-sample Kolmogorov-Smirnov distance to Exp(1).
[[nodiscard]] EvtDiagnostics evt_diagnostics(std::span<const double> m_values, double ks_threshold = 0.05);

/// Exact finite-K moments of K * min(U_1..U_K): mean K/(K+1).
[[nodiscard]] double finite_k_mean(double k_draws);
[[nodiscard]] double finite_k_stddev(double k_draws);

}  // namespace emt::recombinant

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace emt::growth {

struct RomerParams {
  double alpha = 0.33;
  double delta_r = 0.05;  // research productivity
  double phi_r = 1.0;     // returns to the existing idea stock
  double l_a = 1.0;       // research labour
};

/// Discretised unit continuum of product lines. Each entry has mass 1/n.
struct QualityLadderState {
  std::vector<double> qualities;
  std::vector<double> quantities;
};

struct SchumpeterParams {
  double lambda_step = 1.5;
  double psi = 0.5;
  double r_rate = 0.05;
  double pi_flow = 1.0;
  double delta_obs = 0.0;
  double mu = 0.1;
};

struct UnifiedParams {
  double phi_y = 0.3;
  double gamma_y = 0.3;
  double beta_y = 0.33;
  double delta_a = 0.05;
  double delta_q = 0.05;
  double alpha_a = 0.0;
  double alpha_q = 0.0;
  double l_a = 1.0;
  double l_q = 1.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;

  void validate() const;
};

struct UnifiedState {
  double a = 1.0;  // process knowledge
  double q = 1.0;  // product quality
  double k = 1.0;
  double l = 1.0;
};

struct UnifiedStep {
  UnifiedState state;
  double y = 0.0;
  double da_dt = 0.0;
  double dq_dt = 0.0;
};

[[nodiscard]] double cobb_douglas(double a, double k, double l, double alpha);

/// L^(1-alpha) * mass * mean(x_i^alpha): midpoint quadrature of the
/// variety integral with n lines spread over `variety_mass`.
[[nodiscard]] double romer_variety_output(double l_final, std::span<const double> intermediates, double alpha,
                                          double variety_mass = 1.0);

[[nodiscard]] double romer_ideas_step(double a, const RomerParams& params, double dt);

[[nodiscard]] double quality_index(const QualityLadderState& state);

/// Each line upgrades q <- lambda * q with probability min(1, mu * dt).
/// The uniform for line i is derived from (stream_seed, i), so the result
/// does not depend on the thread count. OpenMP over lines.
[[nodiscard]] QualityLadderState ladder_step(const QualityLadderState& state, double mu, double lambda_step,
                                             double dt, std::uint64_t stream_seed);

/// Single-threaded reference for ladder_step; identical output.
[[nodiscard]] QualityLadderState ladder_step_serial(const QualityLadderState& state, double mu,
                                                    double lambda_step, double dt, std::uint64_t stream_seed);

[[nodiscard]] double incumbent_value(double pi_flow, double r_rate, double mu);

/// Arrival intensity solving mu * pi / (r + mu) = psi.
[[nodiscard]] double free_entry_mu(double pi_flow, double psi, double r_rate);

[[nodiscard]] double schumpeter_growth(double lambda_step, double mu, double delta_obs);

[[nodiscard]] double science_production(double l_s, double a_cap, double beta1, double beta2, double theta_sub);

[[nodiscard]] double composite_innovation(double lambda1, double lambda2, double da_dt, double dq_dt);

/// A^phi * Q^gamma * K^beta * L^(1-beta) at the given stocks.
[[nodiscard]] double unified_output(const UnifiedState& state, const UnifiedParams& params);

/// Explicit Euler step of the coupled process/product innovation system,
/// with output evaluated at the updated stocks.
[[nodiscard]] UnifiedStep unified_step(const UnifiedState& state, const UnifiedParams& params, double c_now,
                                       double dt);

}  // namespace emt::growth

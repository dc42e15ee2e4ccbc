#include "emt/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emt/errors.hpp"
#include "emt/rng.hpp"

namespace emt::growth {

void UnifiedParams::validate() const {
  if (!(beta_y > 0.0 && beta_y < 1.0)) throw DomainError("beta_y must lie in (0, 1)");
  if (!(phi_y > 0.0) || !(gamma_y > 0.0)) throw DomainError("phi_y and gamma_y must be > 0");
  if (!(delta_a > 0.0) || !(delta_q > 0.0)) throw DomainError("delta_a and delta_q must be > 0");
  if (alpha_a < 0.0 || alpha_q < 0.0) throw DomainError("alpha_a and alpha_q must be >= 0");
  if (l_a < 0.0 || l_q < 0.0) throw DomainError("l_a and l_q must be >= 0");
  if (lambda1 < 0.0 || lambda2 < 0.0) throw DomainError("lambda1 and lambda2 must be >= 0");
}

double cobb_douglas(double a, double k, double l, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (a < 0.0 || k < 0.0 || l < 0.0) throw DomainError("cobb_douglas inputs must be >= 0");
  return a * std::pow(k, alpha) * std::pow(l, 1.0 - alpha);
}

double romer_variety_output(double l_final, std::span<const double> intermediates, double alpha,
                            double variety_mass) {
  if (intermediates.empty()) throw DomainError("at least one intermediate variety is required");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  double sum = 0.0;
  for (double x : intermediates) {
    if (x < 0.0) throw DomainError("intermediate quantities must be >= 0");
    sum += std::pow(x, alpha);
  }
  const double width = variety_mass / static_cast<double>(intermediates.size());
  return std::pow(l_final, 1.0 - alpha) * sum * width;
}

double romer_ideas_step(double a, const RomerParams& params, double dt) {
  if (a < 0.0) throw DomainError("idea stock must be >= 0");
  if (!(dt > 0.0)) throw DomainError("dt must be > 0");
  return a + params.delta_r * std::pow(a, params.phi_r) * params.l_a * dt;
}

double quality_index(const QualityLadderState& state) {
  if (state.qualities.empty()) throw DomainError("quality ladder is empty");
  const double total = std::accumulate(state.qualities.begin(), state.qualities.end(), 0.0);
  return total / static_cast<double>(state.qualities.size());
}

namespace {

void check_ladder_args(double mu, double lambda_step, double dt) {
  if (!(lambda_step > 1.0)) throw DomainError("lambda_step must be > 1");
  if (mu < 0.0) throw DomainError("mu must be >= 0");
  if (!(dt > 0.0)) throw DomainError("dt must be > 0");
}

}  // namespace

QualityLadderState ladder_step(const QualityLadderState& state, double mu, double lambda_step, double dt,
                               std::uint64_t stream_seed) {
  check_ladder_args(mu, lambda_step, dt);
  const double p_up = std::min(1.0, mu * dt);
  QualityLadderState next = state;
  const auto n = static_cast<std::int64_t>(next.qualities.size());
  double* q = next.qualities.data();

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    if (unit_open(derive_stream(stream_seed, static_cast<std::uint64_t>(i))) < p_up) q[i] *= lambda_step;
  }
  return next;
}

QualityLadderState ladder_step_serial(const QualityLadderState& state, double mu, double lambda_step,
                                      double dt, std::uint64_t stream_seed) {
  check_ladder_args(mu, lambda_step, dt);
  const double p_up = std::min(1.0, mu * dt);
  QualityLadderState next = state;
  for (std::size_t i = 0; i < next.qualities.size(); ++i) {
    if (unit_open(derive_stream(stream_seed, i)) < p_up) next.qualities[i] *= lambda_step;
  }
  return next;
}

double incumbent_value(double pi_flow, double r_rate, double mu) {
  if (!(r_rate + mu > 0.0)) throw DomainError("r_rate + mu must be > 0");
  return pi_flow / (r_rate + mu);
}

double free_entry_mu(double pi_flow, double psi, double r_rate) {
  if (!(r_rate > 0.0)) throw DomainError("r_rate must be > 0");
  if (psi < 0.0) throw DomainError("psi must be >= 0");
  if (psi >= pi_flow) throw DomainError("no free-entry equilibrium: psi >= pi_flow");
  return psi * r_rate / (pi_flow - psi);
}

double schumpeter_growth(double lambda_step, double mu, double delta_obs) {
  if (!(lambda_step > 1.0)) throw DomainError("lambda_step must be > 1");
  if (mu < 0.0 || delta_obs < 0.0) throw DomainError("mu and delta_obs must be >= 0");
  return std::log(lambda_step) * mu - delta_obs;
}

double science_production(double l_s, double a_cap, double beta1, double beta2, double theta_sub) {
  if (!(theta_sub >= 0.0 && theta_sub <= 1.0)) throw DomainError("theta_sub must lie in [0, 1]");
  if (l_s < 0.0 || a_cap < 0.0 || beta1 < 0.0 || beta2 < 0.0) {
    throw DomainError("science_production inputs must be >= 0");
  }
  return beta1 * std::pow(l_s, theta_sub) + beta2 * std::pow(a_cap, 1.0 - theta_sub);
}

double composite_innovation(double lambda1, double lambda2, double da_dt, double dq_dt) {
  if (lambda1 < 0.0 || lambda2 < 0.0) throw DomainError("composite weights must be >= 0");
  return lambda1 * da_dt + lambda2 * dq_dt;
}

double unified_output(const UnifiedState& state, const UnifiedParams& params) {
  return std::pow(state.a, params.phi_y) * std::pow(state.q, params.gamma_y) * std::pow(state.k, params.beta_y) *
         std::pow(state.l, 1.0 - params.beta_y);
}

UnifiedStep unified_step(const UnifiedState& state, const UnifiedParams& params, double c_now, double dt) {
  if (!(c_now > 0.0)) throw NumericError("singular ideation cost: c_now must be > 0");
  if (!(dt > 0.0)) throw DomainError("dt must be > 0");

  UnifiedStep out;
  out.da_dt = params.delta_a * params.l_a * (1.0 + params.alpha_a * state.a) / c_now;
  out.dq_dt = params.delta_q * params.l_q * (1.0 + params.alpha_q * state.q) / c_now;
  out.state = state;
  out.state.a = state.a + out.da_dt * dt;
  out.state.q = state.q + out.dq_dt * dt;
  out.y = unified_output(out.state, params);
  if (!std::isfinite(out.y) || !std::isfinite(out.state.a) || !std::isfinite(out.state.q)) {
    throw NumericError("non-finite value in unified innovation step");
  }
  return out;
}

}  // namespace emt::growth

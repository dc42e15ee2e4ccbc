#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "emt/rng.hpp"

namespace emt::epistemic {

struct EpistemicParams {
  double theta0 = 1.0;       // baseline uncertainty
  double p_bar = 10.0;       // knowledge threshold
  double eps_resid = 0.01;   // residual uncertainty once p >= p_bar
  double alpha_prod = 1.0;   // ideation productivity
  double phi_elast = 1.0;    // AI elasticity of knowledge growth
  double c0 = 1.0;           // baseline ideation cost
  double alpha_cost = 0.0;   // cost sensitivity to AI capability
  double theta_star = 0.5;   // inversion threshold on cost
  double lp = 1.0;           // research labour

  /// Throws DomainError naming the first violated field.
  void validate() const;
};

struct EpistemicState {
  double t = 0.0;
  double p = 0.0;
  double theta = 0.0;
  double c = 1.0;
  double a_cap = 0.0;
  double pi = 1.0;
  bool inverted = false;
};

/// Consistent state at knowledge stock p and capability a_cap.
[[nodiscard]] EpistemicState make_state(double t, double p, double a_cap, const EpistemicParams& params);

/// Replaces the capability and refreshes the cost and inversion flag.
[[nodiscard]] EpistemicState with_capability(const EpistemicState& state, double a_cap,
                                             const EpistemicParams& params);

/// Uncertainty as a function of the knowledge stock; the threshold is inclusive.
[[nodiscard]] double uncertainty(double p, const EpistemicParams& params);

/// One explicit Euler step of dP/dt = alpha * A^phi * L_P using the
/// capability stored in `state`. The caller updates a_cap between steps.
[[nodiscard]] EpistemicState step_knowledge(const EpistemicState& state, const EpistemicParams& params,
                                            double dt);

[[nodiscard]] double marginal_ideation_cost(double c0, double alpha_cost, double a_cap);
[[nodiscard]] double discovery_probability(double theta);

struct Problem {
  std::uint64_t id = 0;
  double complexity = 0.0;
  bool open = true;
};

struct ProblemPool {
  std::vector<Problem> problems;
  double eta_rate = 0.0;
  double lambda_align = 1.0;
  double eps_floor = 1e-6;

  [[nodiscard]] std::size_t open_count() const;
  void validate() const;
};

struct ResearchOutput {
  double r = 0.0;
  // One entry per problem in pool order; closed problems carry 0.
  std::vector<double> solve_probs;
  // Problems whose raw ratio A / (complexity + eps) exceeded 1.
  std::size_t clamped = 0;
};

[[nodiscard]] ResearchOutput research_output(const ProblemPool& pool, double a_cap);

struct PoolStep {
  ProblemPool pool;
  bool surplus = false;
  std::uint64_t arrivals = 0;
  std::uint64_t resolved = 0;
};

/// Stochastic pool update. Arrivals are Poisson(eta * dt) with complexity
/// drawn Exp(mean = complexity_mean); each open problem resolves with
/// probability min(1, lambda * pi_i * dt).
[[nodiscard]] PoolStep step_problem_pool(const ProblemPool& pool, const ResearchOutput& output, double dt,
                                         Rng& rng, double complexity_mean = 1.0);

[[nodiscard]] double hamiltonian_value(double u, double lam1, double lam2, double phi_val, double delta,
                                       double k, double gamma_val);

struct CostSample {
  double t;
  double cost;
};

/// First sample time with cost strictly below theta_star.
[[nodiscard]] std::optional<double> inversion_crossing(std::span<const CostSample> series, double theta_star);

}  // namespace emt::epistemic

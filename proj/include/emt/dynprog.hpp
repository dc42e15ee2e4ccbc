#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace emt::dynprog {

struct Shock {
  double probability = 1.0;
  std::string label;
};

/// Finite research MDP. Tables are row-major:
///   reward(s, a)         rewards[s * n_actions + a]
///   next(s, a, shock k)  transition[(s * n_actions + a) * shocks.size() + k]
struct MdpSpec {
  std::size_t n_states = 1;
  std::size_t n_actions = 1;
  std::vector<double> rewards;
  std::vector<Shock> shocks;
  std::vector<std::size_t> transition;
  double beta = 0.9;

  [[nodiscard]] double reward(std::size_t s, std::size_t a) const { return rewards[s * n_actions + a]; }
  [[nodiscard]] double& reward(std::size_t s, std::size_t a) { return rewards[s * n_actions + a]; }
  [[nodiscard]] std::size_t next(std::size_t s, std::size_t a, std::size_t k) const {
    return transition[(s * n_actions + a) * shocks.size() + k];
  }

  /// Throws InputError on inconsistent tables or DomainError on beta/probabilities.
  void validate() const;
};

struct Solution {
  std::vector<double> values;
  std::vector<std::size_t> policy;
  std::size_t iterations = 0;
  double residual = 0.0;
  // Sup-norm of every update, in iteration order.
  std::vector<double> residual_history;
};

enum class Backend { parallel, serial };

/// One Bellman backup of `values`, writing the backed-up values and the
/// greedy actions (lowest index on ties). OpenMP over states.
void bellman_backup(const MdpSpec& spec, const std::vector<double>& values, std::vector<double>& out_values,
                    std::vector<std::size_t>& out_policy);
void bellman_backup_serial(const MdpSpec& spec, const std::vector<double>& values,
                           std::vector<double>& out_values, std::vector<std::size_t>& out_policy);

/// Iterates backups from V = 0 until the sup-norm update is <= tol.
/// Throws NonConvergenceError carrying the last residual after max_iter.
[[nodiscard]] Solution value_iteration(const MdpSpec& spec, double tol = 1e-10, std::size_t max_iter = 1000000,
                                       Backend backend = Backend::parallel);

/// Exact value of a fixed stationary policy by a direct linear solve.
[[nodiscard]] std::vector<double> evaluate_policy(const MdpSpec& spec, const std::vector<std::size_t>& policy);

/// Marginal reward over ideation cost. Throws NumericError when the cost is
/// at or below the guard, where the ratio is unbounded.
[[nodiscard]] double ideation_surplus(double marginal_reward, double c_ideation, double eps_guard = 1e-9);

/// Per-state V*(s) - V_legacy(s).
[[nodiscard]] std::vector<double> realtime_surplus(const MdpSpec& spec, const std::vector<std::size_t>& legacy_policy,
                                                   double tol = 1e-12);

/// Maps (base spec, scalar policy parameter) to a perturbed spec.
using Perturbation = std::function<MdpSpec(const MdpSpec&, double)>;

/// Adds p to every reward entry.
[[nodiscard]] Perturbation uniform_reward_offset();
/// Adds p to the rewards of a single action in every state.
[[nodiscard]] Perturbation action_reward_offset(std::size_t action);

/// Central difference (V(p+h) - V(p-h)) / 2h of the optimal values at p = 0.
[[nodiscard]] std::vector<double> path_sensitivity(const MdpSpec& spec, double h,
                                                   const Perturbation& perturbation = uniform_reward_offset(),
                                                   double tol = 1e-12);

}  // namespace emt::dynprog

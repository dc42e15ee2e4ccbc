#include "emt/dynprog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>

#include "emt/errors.hpp"

namespace emt::dynprog {

void MdpSpec::validate() const {
  if (n_states < 1 || n_actions < 1) throw InputError("MDP needs at least one state and one action");
  if (shocks.empty()) throw InputError("MDP needs a non-empty shock support");
  if (rewards.size() != n_states * n_actions) throw InputError("reward table must be n_states x n_actions");
  if (transition.size() != n_states * n_actions * shocks.size()) {
    throw InputError("transition table must be n_states x n_actions x shocks");
  }
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  double total = 0.0;
  for (const auto& shock : shocks) {
    if (shock.probability < 0.0) throw DomainError("shock probabilities must be >= 0");
    total += shock.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("shock probabilities must sum to 1");
  for (double r : rewards) {
    if (!std::isfinite(r)) throw DomainError("rewards must be finite");
  }
  for (std::size_t next_state : transition) {
    if (next_state >= n_states) throw InputError("transition lands outside the state space");
  }
}

namespace {

inline void backup_state(const MdpSpec& spec, const std::vector<double>& values, std::size_t s,
                         double& best_value, std::size_t& best_action) {
  best_value = -std::numeric_limits<double>::infinity();
  best_action = 0;
  for (std::size_t a = 0; a < spec.n_actions; ++a) {
    double expected = 0.0;
    for (std::size_t k = 0; k < spec.shocks.size(); ++k) {
      expected += spec.shocks[k].probability * values[spec.next(s, a, k)];
    }
    const double q = spec.reward(s, a) + spec.beta * expected;
    if (q > best_value) {
      best_value = q;
      best_action = a;
    }
  }
}

}  // namespace

void bellman_backup(const MdpSpec& spec, const std::vector<double>& values, std::vector<double>& out_values,
                    std::vector<std::size_t>& out_policy) {
  out_values.resize(spec.n_states);
  out_policy.resize(spec.n_states);
  const auto n = static_cast<std::int64_t>(spec.n_states);

#pragma omp parallel for schedule(static) if (n > 256)
  for (std::int64_t s = 0; s < n; ++s) {
    const auto i = static_cast<std::size_t>(s);
    backup_state(spec, values, i, out_values[i], out_policy[i]);
  }
}

void bellman_backup_serial(const MdpSpec& spec, const std::vector<double>& values,
                           std::vector<double>& out_values, std::vector<std::size_t>& out_policy) {
  out_values.resize(spec.n_states);
  out_policy.resize(spec.n_states);
  for (std::size_t s = 0; s < spec.n_states; ++s) backup_state(spec, values, s, out_values[s], out_policy[s]);
}

Solution value_iteration(const MdpSpec& spec, double tol, std::size_t max_iter, Backend backend) {
  spec.validate();
  if (!(tol > 0.0)) throw DomainError("tol must be > 0");
  const auto backup = backend == Backend::parallel ? &bellman_backup : &bellman_backup_serial;

  Solution sol;
  std::vector<double> current(spec.n_states, 0.0);
  std::vector<double> next;
  std::vector<std::size_t> policy;
  double residual = std::numeric_limits<double>::infinity();

  for (std::size_t it = 1; it <= max_iter; ++it) {
    backup(spec, current, next, policy);
    residual = 0.0;
    for (std::size_t s = 0; s < spec.n_states; ++s) residual = std::max(residual, std::abs(next[s] - current[s]));
    sol.residual_history.push_back(residual);
    current.swap(next);
    if (residual <= tol) {
      sol.iterations = it;
      sol.residual = residual;
      // Greedy actions with respect to the returned values.
      backup(spec, current, next, policy);
      sol.values = std::move(current);
      sol.policy = std::move(policy);
      return sol;
    }
  }
  throw NonConvergenceError("value iteration did not converge within max_iter", residual);
}

std::vector<double> evaluate_policy(const MdpSpec& spec, const std::vector<std::size_t>& policy) {
  spec.validate();
  if (policy.size() != spec.n_states) throw InputError("policy must assign one action per state");
  const auto n = static_cast<Eigen::Index>(spec.n_states);
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs(n);
  for (std::size_t s = 0; s < spec.n_states; ++s) {
    const std::size_t a = policy[s];
    if (a >= spec.n_actions) throw InputError("policy action out of range");
    const auto row = static_cast<Eigen::Index>(s);
    rhs[row] = spec.reward(s, a);
    for (std::size_t k = 0; k < spec.shocks.size(); ++k) {
      system(row, static_cast<Eigen::Index>(spec.next(s, a, k))) -= spec.beta * spec.shocks[k].probability;
    }
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) throw NumericError("singular policy-evaluation system");
  const Eigen::VectorXd v = lu.solve(rhs);
  return {v.data(), v.data() + v.size()};
}

double ideation_surplus(double marginal_reward, double c_ideation, double eps_guard) {
  if (!(eps_guard > 0.0)) throw DomainError("eps_guard must be > 0");
  if (c_ideation <= eps_guard) throw NumericError("unbounded ideation surplus: cost at or below guard");
  return marginal_reward / c_ideation;
}

namespace {

// Optimal values evaluated exactly on the converged greedy policy.
std::vector<double> optimal_values(const MdpSpec& spec, double tol) {
  const Solution sol = value_iteration(spec, tol);
  return evaluate_policy(spec, sol.policy);
}

}  // namespace

std::vector<double> realtime_surplus(const MdpSpec& spec, const std::vector<std::size_t>& legacy_policy,
                                     double tol) {
  const std::vector<double> legacy = evaluate_policy(spec, legacy_policy);
  std::vector<double> best = optimal_values(spec, tol);
  for (std::size_t s = 0; s < best.size(); ++s) best[s] -= legacy[s];
  return best;
}

Perturbation uniform_reward_offset() {
  return [](const MdpSpec& base, double p) {
    MdpSpec out = base;
    for (double& r : out.rewards) r += p;
    return out;
  };
}

Perturbation action_reward_offset(std::size_t action) {
  return [action](const MdpSpec& base, double p) {
    if (action >= base.n_actions) throw InputError("perturbed action out of range");
    MdpSpec out = base;
    for (std::size_t s = 0; s < out.n_states; ++s) out.reward(s, action) += p;
    return out;
  };
}

std::vector<double> path_sensitivity(const MdpSpec& spec, double h, const Perturbation& perturbation,
                                     double tol) {
  if (!(h > 0.0)) throw DomainError("h must be > 0");
  const std::vector<double> up = optimal_values(perturbation(spec, h), tol);
  const std::vector<double> down = optimal_values(perturbation(spec, -h), tol);
  std::vector<double> derivative(up.size());
  for (std::size_t s = 0; s < up.size(); ++s) derivative[s] = (up[s] - down[s]) / (2.0 * h);
  return derivative;
}

}  // namespace emt::dynprog

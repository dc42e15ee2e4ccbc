#pragma once

// Reference computations used by unit and acceptance tests. Each one is
// written from the model definition and avoids the library's solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "emt/dynprog.hpp"
#include "emt/game.hpp"
#include "emt/policy.hpp"

namespace emt::oracle {

// ------------------------------------------------------------- combinatorics

/// Sum of C(n, a) for a = 0..n, built from Pascal's triangle.
inline std::uint64_t binomial_row_sum(unsigned n) {
  std::vector<std::uint64_t> row{1};
  for (unsigned i = 0; i < n; ++i) {
    std::vector<std::uint64_t> next(row.size() + 1, 0);
    for (std::size_t j = 0; j < row.size(); ++j) {
      next[j] += row[j];
      next[j + 1] += row[j];
    }
    row = std::move(next);
  }
  std::uint64_t sum = 0;
  for (auto c : row) sum += c;
  return sum;
}

// ----------------------------------------------------------------- statistics

/// One-sample Kolmogorov-Smirnov distance against the Exp(1) CDF.
inline double ks_exp1(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = xs[i] <= 0.0 ? 0.0 : 1.0 - std::exp(-xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

// ------------------------------------------------------------------------ MDP

/// Gaussian elimination with partial pivoting on a dense square system.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-14) throw std::runtime_error("singular system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

/// V = r_pi + beta * P_pi V solved directly.
inline std::vector<double> policy_value(const dynprog::MdpSpec& spec, const std::vector<std::size_t>& policy) {
  const std::size_t n = spec.n_states;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t act = policy[s];
    a[s][s] += 1.0;
    b[s] = spec.rewards[s * spec.n_actions + act];
    for (std::size_t k = 0; k < spec.shocks.size(); ++k) {
      const std::size_t next = spec.transition[(s * spec.n_actions + act) * spec.shocks.size() + k];
      a[s][next] -= spec.beta * spec.shocks[k].probability;
    }
  }
  return solve_dense(std::move(a), std::move(b));
}

struct EnumerationResult {
  std::vector<double> best_values;  // per-state maximum over all stationary policies
  std::size_t policies = 0;
};

/// Evaluates every deterministic stationary policy.
inline EnumerationResult enumerate_policies(const dynprog::MdpSpec& spec) {
  EnumerationResult out;
  out.best_values.assign(spec.n_states, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> policy(spec.n_states, 0);
  while (true) {
    const auto v = policy_value(spec, policy);
    for (std::size_t s = 0; s < spec.n_states; ++s) out.best_values[s] = std::max(out.best_values[s], v[s]);
    ++out.policies;
    std::size_t i = 0;
    while (i < spec.n_states && ++policy[i] == spec.n_actions) policy[i++] = 0;
    if (i == spec.n_states) break;
  }
  return out;
}

/// Random MDP with rewards in [0, 1), uniform transitions and random shock weights.
inline dynprog::MdpSpec random_mdp(std::uint64_t seed, std::size_t n_states, std::size_t n_actions,
                                   std::size_t n_shocks, double beta) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> state(0, n_states - 1);
  dynprog::MdpSpec spec;
  spec.n_states = n_states;
  spec.n_actions = n_actions;
  spec.beta = beta;
  for (std::size_t i = 0; i < n_states * n_actions; ++i) spec.rewards.push_back(unit(gen));
  double total = 0.0;
  std::vector<double> w(n_shocks);
  for (auto& x : w) total += (x = 0.1 + unit(gen));
  for (std::size_t k = 0; k < n_shocks; ++k) spec.shocks.push_back({w[k] / total, "k" + std::to_string(k)});
  for (std::size_t i = 0; i < n_states * n_actions * n_shocks; ++i) spec.transition.push_back(state(gen));
  return spec;
}

// --------------------------------------------------------------------- policy

struct GridOracle {
  double objective = 0.0;
  std::vector<double> spend;  // per occupation at the best grid point
};

/// Spend s * L(s) is increasing in s, so each spend level maps to one subsidy.
inline double subsidy_for_spend(const policy::Occupation& occ, double spend) {
  if (spend <= 0.0) return 0.0;
  auto f = [&](double s) { return s * occ.l_bar * (1.0 + occ.eta * std::log1p(s / occ.w)) - spend; };
  double lo = 0.0;
  double hi = spend / occ.l_bar;  // L(s) >= l_bar, so s <= spend / l_bar
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Exhaustive search over budget shares on a grid with `steps` cells.
/// Supports two or three occupations.
inline GridOracle subsidy_grid(const policy::SubsidyProblem& problem, unsigned steps) {
  const std::size_t n = problem.occupations.size();
  if (n < 2 || n > 3) throw std::invalid_argument("grid oracle handles 2 or 3 occupations");
  std::vector<std::vector<double>> value(n, std::vector<double>(steps + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& occ = problem.occupations[i];
    for (unsigned k = 0; k <= steps; ++k) {
      const double s = subsidy_for_spend(occ, problem.budget * k / steps);
      value[i][k] = occ.lambda_align * occ.l_bar * (1.0 + occ.eta * std::log1p(s / occ.w));
    }
  }
  GridOracle best{-std::numeric_limits<double>::infinity(), {}};
  for (unsigned a = 0; a <= steps; ++a) {
    if (n == 2) {
      const double v = value[0][a] + value[1][steps - a];
      if (v > best.objective) best = {v, {problem.budget * a / steps, problem.budget * (steps - a) / steps}};
      continue;
    }
    for (unsigned b = 0; a + b <= steps; ++b) {
      const unsigned c = steps - a - b;
      const double v = value[0][a] + value[1][b] + value[2][c];
      if (v > best.objective) {
        best = {v, {problem.budget * a / steps, problem.budget * b / steps, problem.budget * c / steps}};
      }
    }
  }
  return best;
}

// ----------------------------------------------------------------------- game

struct PlayerValue {
  double disc = 0.0;    // probability of a discontinuity from here on
  double payoff = 0.0;  // expected discounted stage payoff
};

inline double stage_payoff(const game::StageGame& g, game::ActionProfile profile, std::size_t player) {
  const unsigned defectors = static_cast<unsigned>(__builtin_popcount(profile));
  const bool me = (profile >> player) & 1U;
  if (defectors == 0) return g.payoff_cc;
  if (defectors == g.n_players) return g.payoff_dd;
  return me ? g.payoff_defector : g.payoff_victim;
}

inline game::ActionProfile profile_actions(const game::Profile& profile, std::size_t round,
                                           const game::History& h) {
  game::ActionProfile a = 0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].defects(round, h)) a |= game::ActionProfile{1} << i;
  }
  return a;
}

/// Walks every discontinuity realization explicitly: at each round with d
/// defectors, each defection independently triggers a discontinuity with
/// probability p; the game stops at the first one.
inline std::vector<PlayerValue> event_tree(const game::StageGame& g, const game::Profile& profile,
                                           game::History h, double weight) {
  std::vector<PlayerValue> acc(g.n_players);
  if (h.size() == g.horizon) return acc;
  const std::size_t round = h.size();
  const auto act = profile_actions(profile, round, h);
  const unsigned defectors = static_cast<unsigned>(__builtin_popcount(act));
  const double disc_factor = std::pow(g.delta_disc, static_cast<double>(round));
  for (std::size_t i = 0; i < g.n_players; ++i) acc[i].payoff += weight * disc_factor * stage_payoff(g, act, i);

  // Enumerate which of the defections fire; any firing ends the game.
  double survive = 1.0;
  for (unsigned mask = 0; mask < (1U << defectors); ++mask) {
    const unsigned fired = static_cast<unsigned>(__builtin_popcount(mask));
    const double prob = std::pow(g.p_disc, fired) * std::pow(1.0 - g.p_disc, defectors - fired);
    if (fired == 0) {
      survive = prob;
      continue;
    }
    for (auto& v : acc) v.disc += weight * prob;
  }
  if (survive > 0.0) {
    h.push_back(act);
    const auto rest = event_tree(g, profile, h, weight * survive);
    for (std::size_t i = 0; i < g.n_players; ++i) {
      acc[i].disc += rest[i].disc;
      acc[i].payoff += rest[i].payoff;
    }
  }
  return acc;
}

inline double scalar_value(const game::StageGame& g, const PlayerValue& v) { return v.payoff + g.omega * v.disc; }

inline bool better(const game::StageGame& g, const PlayerValue& a, const PlayerValue& b, double tol = 1e-9) {
  if (g.penalty_mode == game::PenaltyMode::finite) return scalar_value(g, a) > scalar_value(g, b) + tol;
  if (a.disc < b.disc - tol) return true;
  if (a.disc > b.disc + tol) return false;
  return a.payoff > b.payoff + tol;
}

/// Best value player i can reach from history h (rounds h.size()..T-1, values
/// discounted from round 0 and conditioned on reaching h) by any sequence of
/// own actions, with the other players following the profile.
inline PlayerValue best_response(const game::StageGame& g, const game::Profile& profile, std::size_t player,
                                 const game::History& h) {
  if (h.size() == g.horizon) return {};
  const std::size_t round = h.size();
  const auto base = profile_actions(profile, round, h);
  PlayerValue best{};
  bool have = false;
  for (int mine = 0; mine < 2; ++mine) {
    auto act = base & ~(game::ActionProfile{1} << player);
    if (mine) act |= game::ActionProfile{1} << player;
    const unsigned defectors = static_cast<unsigned>(__builtin_popcount(act));
    const double survive = std::pow(1.0 - g.p_disc, defectors);
    auto next = h;
    next.push_back(act);
    const auto rest = best_response(g, profile, player, next);
    PlayerValue v;
    v.payoff = std::pow(g.delta_disc, static_cast<double>(round)) * stage_payoff(g, act, player) + survive * rest.payoff;
    v.disc = 1.0 - survive * (1.0 - rest.disc);
    if (!have || better(g, v, best)) best = v;
    have = true;
  }
  return best;
}

/// Profile value from history h, on the same conditioning as best_response.
inline std::vector<PlayerValue> follow(const game::StageGame& g, const game::Profile& profile, const game::History& h) {
  return event_tree(g, profile, h, 1.0);
}

/// Subgame perfection by comparing the profile against unrestricted best
/// responses at every history, reachable or not.
inline bool spne_by_best_response(const game::StageGame& g, const game::Profile& profile) {
  std::function<bool(const game::History&)> visit = [&](const game::History& h) {
    if (h.size() == g.horizon) return true;
    const auto values = follow(g, profile, h);
    for (std::size_t i = 0; i < g.n_players; ++i) {
      if (better(g, best_response(g, profile, i, h), values[i])) return false;
    }
    for (game::ActionProfile a = 0; a < (game::ActionProfile{1} << g.n_players); ++a) {
      auto next = h;
      next.push_back(a);
      if (!visit(next)) return false;
    }
    return true;
  };
  return visit({});
}

}  // namespace emt::oracle

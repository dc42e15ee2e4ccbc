#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace emt::game {

enum class PenaltyMode { lexicographic, finite };
enum class StrategyClass { open_loop, memory_one };

/// Bit i set means player i defects in that round.
using ActionProfile = std::uint32_t;
using History = std::vector<ActionProfile>;

/// n-player repeated cooperation game. Stage payoffs: everyone gets
/// payoff_cc when all cooperate and payoff_dd when all defect; otherwise
/// defectors get payoff_defector and cooperators payoff_victim. Each
/// defecting player in a round is an independent event that ends the game
/// for everyone with probability p_disc. In finite mode the penalty omega
/// is added once on discontinuity.
struct StageGame {
  std::size_t n_players = 2;
  double payoff_cc = 2.0;
  double payoff_defector = 3.0;
  double payoff_victim = 0.0;
  double payoff_dd = 1.0;
  double p_disc = 0.0;
  double delta_disc = 0.9;
  std::size_t horizon = 2;
  PenaltyMode penalty_mode = PenaltyMode::finite;
  double omega = 0.0;

  void validate() const;
  [[nodiscard]] double stage_payoff(std::size_t player, ActionProfile profile) const;
};

/// Pure strategy.
///   open_loop:  plan[t] is the action in round t (size horizon)
///   memory_one: plan[0] opens; plan[1 + previous profile] responds (size 1 + 2^n)
/// Actions are 0 (cooperate) or 1 (defect).
struct Strategy {
  StrategyClass kind = StrategyClass::open_loop;
  std::vector<std::uint8_t> plan;

  [[nodiscard]] bool defects(std::size_t round, const History& history) const;
  [[nodiscard]] std::string to_string() const;
};

using Profile = std::vector<Strategy>;

[[nodiscard]] Strategy constant_strategy(StrategyClass kind, const StageGame& game, bool defect);
[[nodiscard]] Profile constant_profile(StrategyClass kind, const StageGame& game, bool defect);

/// Per-player continuation value: probability that a discontinuity occurs
/// from this point on, and expected discounted stage payoff (without omega).
struct LexValue {
  double discontinuity = 0.0;
  double payoff = 0.0;
};

struct OutcomeEvaluation {
  // Finite mode: payoff + omega * P(discontinuity). Lexicographic: payoff only.
  std::vector<double> expected_payoffs;
  std::vector<LexValue> lexicographic;
  double continuity_prob = 1.0;
};

/// Throws InputError if the profile does not cover every player and round.
void check_profile(const StageGame& game, const Profile& profile);

[[nodiscard]] OutcomeEvaluation evaluate_profile(const StageGame& game, const Profile& profile);

/// Continuation values for every player from `history` (rounds history.size()..T-1).
/// When deviator < n_players, that player plays the opposite action in the
/// first round of the subgame and follows the profile afterwards.
[[nodiscard]] std::vector<LexValue> continuation(const StageGame& game, const Profile& profile,
                                                 const History& history,
                                                 std::size_t deviator = static_cast<std::size_t>(-1));

/// True when `candidate` is strictly preferred to `incumbent` under the game's penalty mode.
[[nodiscard]] bool strictly_prefers(const StageGame& game, const LexValue& candidate, const LexValue& incumbent);

/// Subgame perfection via one-shot deviations at every history of length < T
/// (on and off path).
[[nodiscard]] bool is_spne(const StageGame& game, const Profile& profile);

struct SpneReport {
  std::vector<Profile> equilibria;
  bool all_c_is_spne = false;
  bool all_d_is_spne = false;
  std::size_t profiles_checked = 0;
};

inline constexpr std::size_t kMaxProfiles = std::size_t{1} << 20;

/// Number of pure profiles in a strategy class.
[[nodiscard]] std::size_t profile_count(const StageGame& game, StrategyClass kind);
[[nodiscard]] Profile profile_at(const StageGame& game, StrategyClass kind, std::size_t index);

/// Exhaustive search over a strategy class. OpenMP over profiles; the
/// equilibrium list is ordered by profile index. Throws SizeError when
/// n > 3, T > 3 or the class exceeds kMaxProfiles.
[[nodiscard]] SpneReport spne_search(const StageGame& game, StrategyClass kind);
[[nodiscard]] SpneReport spne_search_serial(const StageGame& game, StrategyClass kind);

}  // namespace emt::game

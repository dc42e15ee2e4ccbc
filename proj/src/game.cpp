#include "emt/game.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "emt/errors.hpp"

namespace emt::game {

namespace {

constexpr double kTol = 1e-9;
constexpr std::size_t kNoDeviator = static_cast<std::size_t>(-1);

std::size_t bits_per_strategy(const StageGame& game, StrategyClass kind) {
  return kind == StrategyClass::open_loop ? game.horizon : 1 + (std::size_t{1} << game.n_players);
}

std::size_t plan_size(const StageGame& game, StrategyClass kind) { return bits_per_strategy(game, kind); }

ActionProfile joint_action(const Profile& profile, std::size_t round, const History& history) {
  ActionProfile mask = 0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].defects(round, history)) mask |= ActionProfile{1} << i;
  }
  return mask;
}

void continuation_into(const StageGame& game, const Profile& profile, History& history, std::size_t deviator,
                       std::vector<LexValue>& out) {
  const std::size_t t = history.size();
  if (t >= game.horizon) {
    out.assign(game.n_players, LexValue{});
    return;
  }
  ActionProfile mask = joint_action(profile, t, history);
  if (deviator < game.n_players) mask ^= ActionProfile{1} << deviator;

  const double survive = std::pow(1.0 - game.p_disc, std::popcount(mask));
  history.push_back(mask);
  continuation_into(game, profile, history, kNoDeviator, out);
  history.pop_back();

  const double weight = std::pow(game.delta_disc, static_cast<double>(t));
  for (std::size_t i = 0; i < game.n_players; ++i) {
    out[i].payoff = weight * game.stage_payoff(i, mask) + survive * out[i].payoff;
    out[i].discontinuity = 1.0 - survive * (1.0 - out[i].discontinuity);
  }
}

double scalar(const StageGame& game, const LexValue& v) { return v.payoff + game.omega * v.discontinuity; }

std::size_t cardinality_or_saturate(std::size_t bits) {
  return bits >= std::numeric_limits<std::size_t>::digits ? std::numeric_limits<std::size_t>::max()
                                                          : std::size_t{1} << bits;
}

void check_search_bounds(const StageGame& game, StrategyClass kind) {
  const std::size_t bits = bits_per_strategy(game, kind) * game.n_players;
  const std::size_t cardinality = cardinality_or_saturate(bits);
  if (game.n_players > 3 || game.horizon > 3) {
    throw SizeError("exhaustive search supports n <= 3 players and T <= 3 rounds; class has " +
                        std::to_string(cardinality) + " profiles",
                    cardinality);
  }
  if (cardinality > kMaxProfiles) {
    throw SizeError("strategy class has " + std::to_string(cardinality) + " profiles, above the bound of " +
                        std::to_string(kMaxProfiles),
                    cardinality);
  }
}

}  // namespace

void StageGame::validate() const {
  if (n_players < 2) throw DomainError("the game needs at least two players");
  if (n_players > 16) throw DomainError("at most 16 players are supported");
  if (!(p_disc >= 0.0 && p_disc <= 1.0)) throw DomainError("p_disc must lie in [0, 1]");
  if (!(delta_disc > 0.0 && delta_disc < 1.0)) throw DomainError("delta_disc must lie in (0, 1)");
  if (horizon < 1) throw DomainError("horizon must be >= 1");
  if (penalty_mode == PenaltyMode::finite && omega > 0.0) throw DomainError("omega must be <= 0");
}

double StageGame::stage_payoff(std::size_t player, ActionProfile profile) const {
  const ActionProfile everyone = (ActionProfile{1} << n_players) - 1;
  if (profile == 0) return payoff_cc;
  if (profile == everyone) return payoff_dd;
  return (profile >> player) & 1U ? payoff_defector : payoff_victim;
}

bool Strategy::defects(std::size_t round, const History& history) const {
  if (kind == StrategyClass::open_loop) return plan.at(round) != 0;
  if (round == 0) return plan.at(0) != 0;
  return plan.at(1 + history.at(round - 1)) != 0;
}

std::string Strategy::to_string() const {
  std::string out = kind == StrategyClass::open_loop ? "open_loop:" : "memory_one:";
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (kind == StrategyClass::memory_one && i == 1) out += '/';
    out += plan[i] ? 'D' : 'C';
  }
  return out;
}

Strategy constant_strategy(StrategyClass kind, const StageGame& game, bool defect) {
  return Strategy{kind, std::vector<std::uint8_t>(plan_size(game, kind), defect ? 1 : 0)};
}

Profile constant_profile(StrategyClass kind, const StageGame& game, bool defect) {
  return Profile(game.n_players, constant_strategy(kind, game, defect));
}

void check_profile(const StageGame& game, const Profile& profile) {
  if (profile.size() != game.n_players) throw InputError("profile must give one strategy per player");
  for (const auto& s : profile) {
    if (s.plan.size() != plan_size(game, s.kind)) {
      throw InputError("strategy plan does not cover every reachable history");
    }
    for (auto a : s.plan) {
      if (a > 1) throw InputError("strategy actions must be 0 (C) or 1 (D)");
    }
  }
}

std::vector<LexValue> continuation(const StageGame& game, const Profile& profile, const History& history,
                                   std::size_t deviator) {
  History h = history;
  std::vector<LexValue> out;
  continuation_into(game, profile, h, deviator, out);
  return out;
}

OutcomeEvaluation evaluate_profile(const StageGame& game, const Profile& profile) {
  game.validate();
  check_profile(game, profile);
  OutcomeEvaluation eval;
  eval.lexicographic = continuation(game, profile, {});
  eval.continuity_prob = 1.0 - eval.lexicographic.front().discontinuity;
  for (const auto& v : eval.lexicographic) {
    eval.expected_payoffs.push_back(game.penalty_mode == PenaltyMode::finite ? scalar(game, v) : v.payoff);
  }
  return eval;
}

bool strictly_prefers(const StageGame& game, const LexValue& candidate, const LexValue& incumbent) {
  if (game.penalty_mode == PenaltyMode::finite) return scalar(game, candidate) > scalar(game, incumbent) + kTol;
  if (candidate.discontinuity < incumbent.discontinuity - kTol) return true;
  if (candidate.discontinuity > incumbent.discontinuity + kTol) return false;
  return candidate.payoff > incumbent.payoff + kTol;
}

bool is_spne(const StageGame& game, const Profile& profile) {
  game.validate();
  check_profile(game, profile);
  const std::size_t profiles_per_round = std::size_t{1} << game.n_players;
  History history;
  for (std::size_t length = 0; length < game.horizon; ++length) {
    std::size_t count = 1;
    for (std::size_t r = 0; r < length; ++r) count *= profiles_per_round;
    history.assign(length, 0);
    for (std::size_t code = 0; code < count; ++code) {
      std::size_t rest = code;
      for (std::size_t r = 0; r < length; ++r) {
        history[r] = static_cast<ActionProfile>(rest % profiles_per_round);
        rest /= profiles_per_round;
      }
      const auto base = continuation(game, profile, history);
      for (std::size_t i = 0; i < game.n_players; ++i) {
        const auto deviation = continuation(game, profile, history, i);
        if (strictly_prefers(game, deviation[i], base[i])) return false;
      }
    }
  }
  return true;
}

std::size_t profile_count(const StageGame& game, StrategyClass kind) {
  return cardinality_or_saturate(bits_per_strategy(game, kind) * game.n_players);
}

Profile profile_at(const StageGame& game, StrategyClass kind, std::size_t index) {
  const std::size_t bits = bits_per_strategy(game, kind);
  Profile profile(game.n_players, Strategy{kind, std::vector<std::uint8_t>(bits)});
  for (std::size_t p = 0; p < game.n_players; ++p) {
    for (std::size_t b = 0; b < bits; ++b) {
      profile[p].plan[b] = static_cast<std::uint8_t>((index >> (p * bits + b)) & 1U);
    }
  }
  return profile;
}

namespace {

SpneReport collect(const StageGame& game, StrategyClass kind, const std::vector<char>& flags) {
  SpneReport report;
  report.profiles_checked = flags.size();
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) report.equilibria.push_back(profile_at(game, kind, i));
  }
  report.all_c_is_spne = is_spne(game, constant_profile(kind, game, false));
  report.all_d_is_spne = is_spne(game, constant_profile(kind, game, true));
  return report;
}

}  // namespace

SpneReport spne_search(const StageGame& game, StrategyClass kind) {
  game.validate();
  check_search_bounds(game, kind);
  const std::size_t total = profile_count(game, kind);
  std::vector<char> flags(total, 0);
  const auto n = static_cast<std::int64_t>(total);

#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    flags[idx] = is_spne(game, profile_at(game, kind, idx)) ? 1 : 0;
  }
  return collect(game, kind, flags);
}

SpneReport spne_search_serial(const StageGame& game, StrategyClass kind) {
  game.validate();
  check_search_bounds(game, kind);
  const std::size_t total = profile_count(game, kind);
  std::vector<char> flags(total, 0);
  for (std::size_t i = 0; i < total; ++i) flags[i] = is_spne(game, profile_at(game, kind, i)) ? 1 : 0;
  return collect(game, kind, flags);
}

}  // namespace emt::game

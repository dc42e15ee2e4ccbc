#include "emt/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "emt/errors.hpp"

namespace emt::policy {

void Occupation::validate() const {
  if (!(w > 0.0)) throw DomainError("occupation wage w must be > 0");
  if (!(l_bar > 0.0)) throw DomainError("occupation l_bar must be > 0");
  if (eta < 0.0) throw DomainError("occupation eta must be >= 0");
  if (lambda_align < 0.0) throw DomainError("occupation lambda_align must be >= 0");
}

void SubsidyProblem::validate() const {
  if (occupations.empty()) throw DomainError("at least one occupation is required");
  if (!(budget > 0.0)) throw DomainError("budget must be > 0");
  for (const auto& occ : occupations) occ.validate();
}

double labor_supply(const Occupation& occ, double s) {
  if (s < 0.0) throw DomainError("subsidy must be >= 0");
  return occ.l_bar * (1.0 + occ.eta * std::log1p(s / occ.w));
}

double subsidy_objective(const SubsidyProblem& problem, std::span<const double> s) {
  double total = 0.0;
  for (std::size_t i = 0; i < problem.occupations.size(); ++i) {
    total += problem.occupations[i].lambda_align * labor_supply(problem.occupations[i], s[i]);
  }
  return total;
}

double subsidy_spend(const SubsidyProblem& problem, std::span<const double> s) {
  double total = 0.0;
  for (std::size_t i = 0; i < problem.occupations.size(); ++i) {
    total += s[i] * labor_supply(problem.occupations[i], s[i]);
  }
  return total;
}

namespace {

// Stationarity gap divided by L_bar; strictly decreasing in s.
double stationarity_gap(const Occupation& occ, double mu, double s) {
  const double marginal_gain = occ.lambda_align * occ.eta / (occ.w + s);
  const double marginal_cost = 1.0 + occ.eta * std::log1p(s / occ.w) + s * occ.eta / (occ.w + s);
  return marginal_gain - mu * marginal_cost;
}

double best_response(const Occupation& occ, double mu) {
  const double gain = occ.lambda_align * occ.eta;
  if (gain <= 0.0 || gain / occ.w <= mu) return 0.0;
  // The gap is negative once gain / (w + s) < mu.
  const double hi = gain / mu;
  std::uintmax_t max_iter = 200;
  const auto root = boost::math::tools::toms748_solve(
      [&](double s) { return stationarity_gap(occ, mu, s); }, 0.0, hi, stationarity_gap(occ, mu, 0.0),
      stationarity_gap(occ, mu, hi), boost::math::tools::eps_tolerance<double>(52), max_iter);
  return 0.5 * (root.first + root.second);
}

std::vector<double> responses(const SubsidyProblem& problem, double mu) {
  std::vector<double> s(problem.occupations.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = best_response(problem.occupations[i], mu);
  return s;
}

double kkt_residual(const SubsidyProblem& problem, std::span<const double> s, double mu) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double gap = stationarity_gap(problem.occupations[i], mu, s[i]);
    // At the s = 0 corner only a positive gap is a violation.
    worst = std::max(worst, s[i] > 0.0 ? std::abs(gap) : std::max(0.0, gap));
  }
  return worst;
}

}  // namespace

SubsidySolution optimize_subsidies(const SubsidyProblem& problem, double tol) {
  problem.validate();
  if (!(tol > 0.0)) throw DomainError("tol must be > 0");

  SubsidySolution sol;
  const std::size_t n = problem.occupations.size();

  double mu_max = 0.0;
  for (const auto& occ : problem.occupations) mu_max = std::max(mu_max, occ.lambda_align * occ.eta / occ.w);
  if (mu_max <= 0.0) {
    sol.s_star.assign(n, 0.0);
    sol.objective = subsidy_objective(problem, sol.s_star);
    sol.note = "no feasible improvement: every lambda * eta is zero";
    return sol;
  }

  auto spend_at = [&](double mu) { return subsidy_spend(problem, responses(problem, mu)); };

  // spend(mu) is decreasing, zero at mu_max and unbounded as mu -> 0.
  double hi = mu_max;
  double lo = 0.5 * mu_max;
  int expansions = 0;
  while (spend_at(lo) <= problem.budget) {
    hi = lo;
    lo *= 0.5;
    if (++expansions > 2000 || lo == 0.0) throw NonConvergenceError("could not bracket the budget multiplier", lo);
  }
  for (int it = 0; it < 400 && hi / lo - 1.0 > 1e-15; ++it) {
    const double mid = std::sqrt(lo * hi);
    (spend_at(mid) > problem.budget ? lo : hi) = mid;
  }

  sol.multiplier = hi;
  sol.s_star = responses(problem, hi);
  sol.spend = subsidy_spend(problem, sol.s_star);
  sol.objective = subsidy_objective(problem, sol.s_star);
  sol.kkt_residual = kkt_residual(problem, sol.s_star, sol.multiplier);
  if (std::abs(sol.spend - problem.budget) > tol * problem.budget || sol.kkt_residual > tol) {
    throw NonConvergenceError("subsidy planner stalled before meeting the budget and KKT tolerances",
                              std::max(std::abs(sol.spend - problem.budget) / problem.budget, sol.kkt_residual));
  }
  return sol;
}

std::vector<IdeaRecord> governance_filter(std::span<const IdeaRecord> ideas, double delta_thresh) {
  std::vector<IdeaRecord> kept;
  std::copy_if(ideas.begin(), ideas.end(), std::back_inserter(kept),
               [&](const IdeaRecord& idea) { return idea.feasible && idea.u_emt > delta_thresh; });
  return kept;
}

std::size_t demanduct_select(std::span<const IdeaRecord> ideas) {
  if (ideas.empty()) throw InputError("no ideas to select from");
  std::size_t best = ideas.size();
  for (std::size_t i = 0; i < ideas.size(); ++i) {
    if (!ideas[i].feasible) continue;
    if (best == ideas.size() || ideas[i].u_emt > ideas[best].u_emt) best = i;
  }
  if (best == ideas.size()) throw InputError("empty selection: no feasible ideas");
  return best;
}

std::vector<std::size_t> exduct(const NeedsKnowledgeLink& link) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < link.knowledge_items.size(); ++i) {
    const auto& item = link.knowledge_items[i];
    if (item.size() != link.needs.size()) throw InputError("knowledge item dimension differs from needs vector");
    if (item.dot(link.needs) > link.threshold) active.push_back(i);
  }
  return active;
}

double recursive_utility(std::span<const double> u_series, double beta, double u_tail) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  double total = 0.0;
  double weight = 1.0;
  for (double u : u_series) {
    total += weight * u;
    weight *= beta;
  }
  return total + weight * u_tail / (1.0 - beta);
}

}  // namespace emt::policy

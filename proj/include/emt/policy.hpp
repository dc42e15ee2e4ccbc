#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace emt::policy {

struct Occupation {
  double w = 1.0;             // market wage
  double l_bar = 1.0;         // baseline labour supply
  double eta = 0.0;           // supply elasticity
  double lambda_align = 0.0;  // alignment coefficient

  void validate() const;
};

struct SubsidyProblem {
  std::vector<Occupation> occupations;
  double budget = 1.0;

  void validate() const;
};

struct SubsidySolution {
  std::vector<double> s_star;
  double objective = 0.0;
  double spend = 0.0;
  double multiplier = 0.0;
  // Largest violation of the per-occupation stationarity conditions.
  double kkt_residual = 0.0;
  std::string note;
};

struct IdeaRecord {
  std::string id;
  double u_emt = 0.0;
  bool feasible = true;
};

struct NeedsKnowledgeLink {
  Eigen::VectorXd needs;
  std::vector<Eigen::VectorXd> knowledge_items;
  double threshold = 0.0;
};

/// L_bar * (1 + eta * ln(1 + s / w)).
[[nodiscard]] double labor_supply(const Occupation& occ, double s);

/// Sum of lambda_i * L_i(s_i).
[[nodiscard]] double subsidy_objective(const SubsidyProblem& problem, std::span<const double> s);
/// Sum of s_i * L_i(s_i).
[[nodiscard]] double subsidy_spend(const SubsidyProblem& problem, std::span<const double> s);

/// Maximises the alignment-weighted labour supply under the budget. Outer
/// bisection on the budget multiplier; for each multiplier every
/// occupation's stationarity condition
///   lambda * eta / (w + s) = mu * (1 + eta * ln(1 + s/w) + s * eta / (w + s))
/// is solved by a bracketed root finder (s = 0 when the left side is
/// already below mu at s = 0).
[[nodiscard]] SubsidySolution optimize_subsidies(const SubsidyProblem& problem, double tol = 1e-9);

/// Ideas with u_emt > delta_thresh that are feasible, in input order.
[[nodiscard]] std::vector<IdeaRecord> governance_filter(std::span<const IdeaRecord> ideas, double delta_thresh);

/// Position of the highest-scoring feasible idea; the lowest index wins ties.
/// Throws InputError when nothing is feasible.
[[nodiscard]] std::size_t demanduct_select(std::span<const IdeaRecord> ideas);

/// Indices of knowledge items whose inner product with the needs vector
/// exceeds the threshold.
[[nodiscard]] std::vector<std::size_t> exduct(const NeedsKnowledgeLink& link);

/// sum_t beta^t u_t + beta^T * u_tail / (1 - beta).
[[nodiscard]] double recursive_utility(std::span<const double> u_series, double beta, double u_tail = 0.0);

}  // namespace emt::policy

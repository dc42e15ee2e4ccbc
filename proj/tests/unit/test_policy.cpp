#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "emt/errors.hpp"
#include "emt/policy.hpp"
#include "support/oracles.hpp"

using namespace emt::policy;

namespace {

SubsidyProblem three_occupations() {
  return {{{1.0, 1.0, 0.5, 1.0}, {1.0, 2.0, 1.0, 1.0}, {2.0, 1.0, 2.0, 3.0}}, 2.0};
}

}  // namespace

TEST_CASE("labor_supply") {
  const Occupation occ{1.0, 1.0, 1.0, 1.0};
  CHECK(labor_supply(occ, 0.0) == 1.0);
  CHECK(labor_supply({2.0, 3.0, 0.0, 1.0}, 7.0) == 3.0);
  CHECK(labor_supply(occ, std::numbers::e - 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS((void)labor_supply(occ, -0.1), emt::DomainError);
}

TEST_CASE("optimize_subsidies: inelastic single occupation") {
  const SubsidyProblem p{{{1.0, 1.0, 0.0, 1.0}}, 5.0};
  const auto sol = optimize_subsidies(p);
  CHECK(sol.s_star[0] == 0.0);
  CHECK(sol.spend == 0.0);
  CHECK_FALSE(sol.note.empty());
}

TEST_CASE("optimize_subsidies: the three-occupation instance") {
  const auto problem = three_occupations();
  const auto sol = optimize_subsidies(problem, 1e-10);
  const auto grid = emt::oracle::subsidy_grid(problem, 1000);
  CHECK(std::abs(sol.objective - grid.objective) < 1e-3);
  // The continuous optimum can only beat a grid point.
  CHECK(sol.objective >= grid.objective - 1e-12);
  CHECK(std::abs(sol.spend - problem.budget) <= 1e-3 * problem.budget);
  CHECK(sol.kkt_residual <= 1e-10);
  CHECK(sol.objective == doctest::Approx(subsidy_objective(problem, sol.s_star)).epsilon(1e-14));
  CHECK(sol.spend == doctest::Approx(subsidy_spend(problem, sol.s_star)).epsilon(1e-14));
}

TEST_CASE("optimize_subsidies: random instances against the grid oracle") {
  std::mt19937_64 gen(2718);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int trial = 0; trial < 15; ++trial) {
    SubsidyProblem p;
    p.budget = u(gen);
    for (int i = 0; i < 3; ++i) p.occupations.push_back({u(gen), u(gen), u(gen), u(gen)});
    const auto sol = optimize_subsidies(p);
    const auto grid = emt::oracle::subsidy_grid(p, 600);
    CHECK(sol.objective >= grid.objective - 1e-12);
    CHECK(sol.objective - grid.objective < 1e-3);
    CHECK(std::abs(sol.spend - p.budget) <= 1e-3 * p.budget);
  }
}

TEST_CASE("optimize_subsidies: symmetric occupations split evenly") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Occupation occ{u(gen), u(gen), u(gen), u(gen)};
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
    const SubsidyProblem p{std::vector<Occupation>(n, occ), u(gen)};
    const auto sol = optimize_subsidies(p);
    for (std::size_t i = 1; i < n; ++i) CHECK(std::abs(sol.s_star[i] - sol.s_star[0]) < 1e-6);
  }
}

TEST_CASE("optimize_subsidies: weak occupations can stay unsubsidised") {
  // Marginal value per unit spend at s = 0 is Lambda * eta / w; the second
  // occupation is far below the first, so with a small budget it gets nothing.
  const SubsidyProblem p{{{1.0, 1.0, 2.0, 5.0}, {10.0, 1.0, 0.1, 0.1}}, 0.5};
  const auto sol = optimize_subsidies(p);
  CHECK(sol.s_star[1] == 0.0);
  CHECK(sol.s_star[0] > 0.0);
  CHECK(std::abs(sol.spend - 0.5) < 1e-9 * 0.5);
}

TEST_CASE("optimize_subsidies: invalid problems") {
  SubsidyProblem p = three_occupations();
  p.budget = -1.0;
  CHECK_THROWS((void)optimize_subsidies(p));
  p = three_occupations();
  p.occupations[0].w = 0.0;
  CHECK_THROWS((void)optimize_subsidies(p));
}

TEST_CASE("governance_filter") {
  const std::vector<IdeaRecord> ideas{{"a", 0.2, true}, {"b", 0.7, true}, {"c", 0.9, true}, {"d", 5.0, false}};
  const auto kept = governance_filter(ideas, 0.5);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].id == "b");
  CHECK(kept[1].id == "c");
  CHECK(governance_filter(ideas, 10.0).empty());
  CHECK(governance_filter(ideas, -std::numeric_limits<double>::max()).size() == 3);
}

TEST_CASE("demanduct_select") {
  CHECK(demanduct_select(std::vector<IdeaRecord>{{"x", 1, true}, {"y", 3, true}, {"z", 2, true}}) == 1);
  CHECK(demanduct_select(std::vector<IdeaRecord>{{"x", 2, true}, {"y", 2, true}}) == 0);
  CHECK(demanduct_select(std::vector<IdeaRecord>{{"x", 9, false}, {"y", 2, true}}) == 1);
  CHECK_THROWS_AS((void)demanduct_select(std::vector<IdeaRecord>{{"x", 9, false}}), emt::InputError);

  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<IdeaRecord> ideas;
    for (int i = 0; i < 8; ++i) ideas.push_back({std::to_string(i), u(gen), i % 3 != 0});
    const auto base = demanduct_select(ideas);
    auto transformed = ideas;
    for (auto& idea : transformed) idea.u_emt = std::exp(idea.u_emt) * 7.0 + 1.0;
    CHECK(demanduct_select(transformed) == base);
  }
}

TEST_CASE("exduct") {
  NeedsKnowledgeLink link;
  link.needs = Eigen::Vector2d(1.0, 0.0);
  link.threshold = 0.5;
  link.knowledge_items = {Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(1.0, 0.0)};
  CHECK(exduct(link) == std::vector<std::size_t>{1});

  link.knowledge_items.push_back(Eigen::Vector3d(1.0, 0.0, 0.0));
  CHECK_THROWS_AS((void)exduct(link), emt::InputError);

  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    NeedsKnowledgeLink l;
    l.needs = Eigen::VectorXd::NullaryExpr(4, [&] { return u(gen); });
    l.threshold = 0.2;
    for (int i = 0; i < 10; ++i) l.knowledge_items.push_back(Eigen::VectorXd::NullaryExpr(4, [&] { return u(gen); }));
    const auto base = exduct(l);
    // Scale by a power of two so the products scale exactly.
    l.needs *= 4.0;
    l.threshold *= 4.0;
    CHECK(exduct(l) == base);
  }
}

TEST_CASE("recursive_utility") {
  // Constant u = 1 forever: an empty series with tail 1.
  CHECK(recursive_utility(std::vector<double>{}, 0.5, 1.0) == 2.0);
  CHECK(recursive_utility(std::vector<double>{1.0, 1.0}, 0.5) == 1.5);
  CHECK(recursive_utility(std::vector<double>{1.0, 1.0}, 0.5, 1.0) == 2.0);

  std::mt19937_64 gen(15);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> series(1 + trial);
    for (auto& x : series) x = u(gen);
    const double beta = 0.5 + 0.49 * (trial % 7) / 6.0;
    const double tail = u(gen);
    double backward = tail / (1.0 - beta);
    for (auto it = series.rbegin(); it != series.rend(); ++it) backward = *it + beta * backward;
    CHECK(std::abs(recursive_utility(series, beta, tail) - backward) < 1e-12 * std::max(1.0, std::abs(backward)));
  }
}

// Serial reference against OpenMP kernel, one pair per kernel. Run with
// OMP_NUM_THREADS to pick the thread count of the parallel variants.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "emt/dynprog.hpp"
#include "emt/game.hpp"
#include "emt/growth.hpp"
#include "emt/recombinant.hpp"

namespace {

emt::growth::QualityLadderState ladder(std::size_t lines) {
  return {std::vector<double>(lines, 1.0), std::vector<double>(lines, 1.0)};
}

template <auto Step>
void bm_ladder(benchmark::State& st) {
  const auto state = ladder(static_cast<std::size_t>(st.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(Step(state, 0.3, 1.5, 0.1, ++seed));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Draw>
void bm_evt(benchmark::State& st) {
  const emt::recombinant::TailDistribution dist{emt::recombinant::Family::lognormal, 0.0, 1.0};
  const emt::recombinant::EvtRunConfig cfg{static_cast<std::uint64_t>(st.range(0)), 200, 11};
  for (auto _ : st) benchmark::DoNotOptimize(Draw(dist, cfg));
  st.SetItemsProcessed(st.iterations() * st.range(0) * 200);
}

emt::dynprog::MdpSpec random_mdp(std::size_t states) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, states - 1);
  emt::dynprog::MdpSpec spec;
  spec.n_states = states;
  spec.n_actions = 4;
  spec.beta = 0.95;
  spec.shocks = {{0.5, "a"}, {0.3, "b"}, {0.2, "c"}};
  for (std::size_t i = 0; i < states * 4; ++i) spec.rewards.push_back(unit(gen));
  for (std::size_t i = 0; i < states * 4 * 3; ++i) spec.transition.push_back(pick(gen));
  return spec;
}

template <auto Backup>
void bm_bellman(benchmark::State& st) {
  const auto spec = random_mdp(static_cast<std::size_t>(st.range(0)));
  std::vector<double> v(spec.n_states, 1.0);
  std::vector<double> out;
  std::vector<std::size_t> policy;
  for (auto _ : st) {
    Backup(spec, v, out, policy);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Search>
void bm_spne(benchmark::State& st) {
  emt::game::StageGame g;
  g.horizon = static_cast<std::size_t>(st.range(0));
  g.p_disc = 0.2;
  g.penalty_mode = emt::game::PenaltyMode::lexicographic;
  for (auto _ : st) benchmark::DoNotOptimize(Search(g, emt::game::StrategyClass::memory_one));
}

}  // namespace

BENCHMARK(bm_ladder<emt::growth::ladder_step_serial>)->Name("ladder_step/serial")->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(bm_ladder<emt::growth::ladder_step>)->Name("ladder_step/omp")->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(bm_evt<emt::recombinant::draw_max_statistic_serial>)->Name("draw_max_statistic/serial")->Arg(1000)->Arg(10000);
BENCHMARK(bm_evt<emt::recombinant::draw_max_statistic>)->Name("draw_max_statistic/omp")->Arg(1000)->Arg(10000);
BENCHMARK(bm_bellman<emt::dynprog::bellman_backup_serial>)->Name("bellman_backup/serial")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(bm_bellman<emt::dynprog::bellman_backup>)->Name("bellman_backup/omp")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(bm_spne<emt::game::spne_search_serial>)->Name("spne_search/serial")->Arg(2)->Arg(3);
BENCHMARK(bm_spne<emt::game::spne_search>)->Name("spne_search/omp")->Arg(2)->Arg(3);

BENCHMARK_MAIN();

#include "emt/epistemic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emt/errors.hpp"

namespace emt::epistemic {

namespace {

double finite_or_throw(double value, const char* field) {
  if (!std::isfinite(value)) {
    throw NumericError(std::string("numeric overflow in field '") + field + "'");
  }
  return value;
}

void require(bool ok, const char* message) {
  if (!ok) throw DomainError(message);
}

}  // namespace

void EpistemicParams::validate() const {
  require(theta0 > 0.0, "theta0 must be > 0");
  require(p_bar > 0.0, "p_bar must be > 0");
  require(eps_resid >= 0.0 && eps_resid < theta0, "eps_resid must satisfy 0 <= eps_resid < theta0");
  require(c0 > 0.0, "c0 must be > 0");
  require(alpha_cost >= 0.0, "alpha_cost must be >= 0");
  require(phi_elast >= 0.0, "phi_elast must be >= 0");
  require(theta_star > 0.0, "theta_star must be > 0");
  require(lp >= 0.0, "lp must be >= 0");
}

double uncertainty(double p, const EpistemicParams& params) {
  return p >= params.p_bar ? params.eps_resid : params.theta0 / (1.0 + p);
}

EpistemicState make_state(double t, double p, double a_cap, const EpistemicParams& params) {
  EpistemicState s;
  s.t = t;
  s.p = p;
  s.a_cap = a_cap;
  s.theta = uncertainty(p, params);
  s.pi = discovery_probability(s.theta);
  s.c = marginal_ideation_cost(params.c0, params.alpha_cost, a_cap);
  s.inverted = s.c < params.theta_star;
  return s;
}

EpistemicState with_capability(const EpistemicState& state, double a_cap, const EpistemicParams& params) {
  EpistemicState out = state;
  out.a_cap = a_cap;
  out.c = marginal_ideation_cost(params.c0, params.alpha_cost, a_cap);
  out.inverted = out.c < params.theta_star;
  return out;
}

EpistemicState step_knowledge(const EpistemicState& state, const EpistemicParams& params, double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be > 0");
  for (double v : {state.t, state.p, state.a_cap}) {
    if (!std::isfinite(v)) throw DomainError("state fields must be finite");
  }

  const double growth = finite_or_throw(
      params.alpha_prod * std::pow(state.a_cap, params.phi_elast) * params.lp, "dP/dt");

  EpistemicState next = state;
  next.t = state.t + dt;
  next.p = finite_or_throw(state.p + growth * dt, "P");
  next.theta = finite_or_throw(uncertainty(next.p, params), "theta");
  next.pi = discovery_probability(next.theta);
  next.c = finite_or_throw(marginal_ideation_cost(params.c0, params.alpha_cost, state.a_cap), "C");
  next.inverted = next.c < params.theta_star;
  return next;
}

double marginal_ideation_cost(double c0, double alpha_cost, double a_cap) {
  if (!(c0 > 0.0) || alpha_cost < 0.0 || a_cap < 0.0) {
    throw DomainError("marginal_ideation_cost requires c0 > 0, alpha_cost >= 0, a_cap >= 0");
  }
  return c0 / (1.0 + alpha_cost * a_cap);
}

double discovery_probability(double theta) {
  if (!(theta >= 0.0)) throw DomainError("theta must be >= 0");
  return 1.0 / (1.0 + theta);
}

std::size_t ProblemPool::open_count() const {
  return static_cast<std::size_t>(
      std::count_if(problems.begin(), problems.end(), [](const Problem& p) { return p.open; }));
}

void ProblemPool::validate() const {
  if (!(eps_floor > 0.0)) throw DomainError("eps_floor must be > 0");
  if (!(lambda_align >= 0.0 && lambda_align <= 1.0)) throw DomainError("lambda_align must lie in [0, 1]");
  if (eta_rate < 0.0) throw DomainError("eta_rate must be >= 0");
  for (const auto& p : problems) {
    if (!(p.complexity >= 0.0)) throw DomainError("problem complexity must be >= 0");
  }
}

ResearchOutput research_output(const ProblemPool& pool, double a_cap) {
  if (a_cap < 0.0) throw DomainError("a_cap must be >= 0");
  pool.validate();

  ResearchOutput out;
  out.solve_probs.reserve(pool.problems.size());
  double total = 0.0;
  for (const auto& problem : pool.problems) {
    if (!problem.open) {
      out.solve_probs.push_back(0.0);
      continue;
    }
    const double raw = a_cap / (problem.complexity + pool.eps_floor);
    if (raw > 1.0) ++out.clamped;
    const double pi = std::min(1.0, raw);
    out.solve_probs.push_back(pi);
    total += pi;
  }
  out.r = pool.lambda_align * total;
  return out;
}

PoolStep step_problem_pool(const ProblemPool& pool, const ResearchOutput& output, double dt, Rng& rng,
                           double complexity_mean) {
  if (!(dt > 0.0)) throw DomainError("dt must be > 0");
  if (output.solve_probs.size() != pool.problems.size()) {
    throw InputError("research output does not match the problem pool");
  }

  PoolStep step;
  step.pool = pool;
  step.surplus = output.r > pool.eta_rate;

  for (std::size_t i = 0; i < step.pool.problems.size(); ++i) {
    auto& problem = step.pool.problems[i];
    if (!problem.open) continue;
    const double p_resolve = std::min(1.0, pool.lambda_align * output.solve_probs[i] * dt);
    if (rng.bernoulli(p_resolve)) {
      problem.open = false;
      ++step.resolved;
    }
  }

  std::uint64_t next_id = 0;
  for (const auto& problem : pool.problems) next_id = std::max(next_id, problem.id + 1);

  step.arrivals = rng.poisson(pool.eta_rate * dt);
  for (std::uint64_t k = 0; k < step.arrivals; ++k) {
    const double complexity = complexity_mean > 0.0 ? rng.exponential(1.0 / complexity_mean) : 0.0;
    step.pool.problems.push_back({next_id++, complexity, true});
  }
  return step;
}

double hamiltonian_value(double u, double lam1, double lam2, double phi_val, double delta, double k,
                         double gamma_val) {
  return u + lam1 * (phi_val - delta * k) + lam2 * gamma_val;
}

std::optional<double> inversion_crossing(std::span<const CostSample> series, double theta_star) {
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (!(series[i].t > series[i - 1].t)) throw InputError("cost series times must be strictly increasing");
  }
  for (const auto& sample : series) {
    if (sample.cost < theta_star) return sample.t;
  }
  return std::nullopt;
}

}  // namespace emt::epistemic

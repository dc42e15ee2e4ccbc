#include "emt/harness/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "emt/dynprog.hpp"
#include "emt/epistemic.hpp"
#include "emt/feedback.hpp"
#include "emt/game.hpp"
#include "emt/gravity.hpp"
#include "emt/growth.hpp"
#include "emt/harness/csv.hpp"
#include "emt/harness/schema.hpp"
#include "emt/policy.hpp"
#include "emt/recombinant.hpp"
#include "emt/rng.hpp"

namespace emt::harness {

namespace fs = std::filesystem;

namespace {

// Builders raise FieldError; validate_module_params turns it into a message.
struct FieldError : ConfigError {
  FieldError(const std::string& field, const std::string& message) : ConfigError(field + ": " + message) {}
};

double num(const json& p, const char* key) { return p.at(key).get<double>(); }
std::int64_t integer(const json& p, const char* key) { return p.at(key).get<std::int64_t>(); }
std::size_t count(const json& p, const char* key) { return static_cast<std::size_t>(integer(p, key)); }
std::vector<double> numbers(const json& p, const char* key) { return p.at(key).get<std::vector<double>>(); }

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void require_keys(const json& object, const std::vector<std::string>& keys, const std::string& where) {
  for (const auto& [key, _] : object.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      std::string msg = "unknown key '" + key + "'";
      if (auto hint = closest_key(key, keys)) msg += " (did you mean '" + *hint + "'?)";
      throw FieldError(where, msg);
    }
  }
}

double object_number(const json& object, const char* key, const std::string& where) {
  if (!object.contains(key) || !object[key].is_number()) throw FieldError(where + "." + key, "required number");
  return object[key].get<double>();
}

// Domain errors from typed validate() become field errors under `field`.
template <class F>
void as_field(const std::string& field, F&& f) {
  try {
    f();
  } catch (const DomainError& e) {
    throw FieldError(field, e.what());
  } catch (const InputError& e) {
    throw FieldError(field, e.what());
  } catch (const NumericError& e) {
    throw FieldError(field, e.what());
  }
}

// ---------------------------------------------------------------- builders

epistemic::EpistemicParams build_epistemic(const json& p) {
  epistemic::EpistemicParams ep;
  ep.theta0 = num(p, "theta0");
  ep.p_bar = num(p, "p_bar");
  ep.eps_resid = num(p, "eps_resid");
  ep.alpha_prod = num(p, "alpha_prod");
  ep.phi_elast = num(p, "phi_elast");
  ep.c0 = num(p, "c0");
  ep.alpha_cost = num(p, "alpha_cost");
  ep.theta_star = num(p, "theta_star");
  ep.lp = num(p, "lp");
  if (!(ep.eps_resid < ep.theta0)) throw FieldError("eps_resid", "must be < theta0");
  ep.validate();
  return ep;
}

growth::UnifiedParams build_unified(const json& p) {
  growth::UnifiedParams up;
  up.phi_y = num(p, "phi_y");
  up.gamma_y = num(p, "gamma_y");
  up.beta_y = num(p, "beta_y");
  up.delta_a = num(p, "delta_a");
  up.delta_q = num(p, "delta_q");
  up.alpha_a = num(p, "alpha_a");
  up.alpha_q = num(p, "alpha_q");
  up.l_a = num(p, "l_a");
  up.l_q = num(p, "l_q");
  up.lambda1 = num(p, "lambda1");
  up.lambda2 = num(p, "lambda2");
  up.validate();
  if (!(num(p, "psi") < num(p, "pi_flow"))) throw FieldError("psi", "must be < pi_flow for a free-entry equilibrium");
  if (p.at("delta_obs").empty()) throw FieldError("delta_obs", "must have at least one entry");
  return up;
}

recombinant::TailDistribution build_tail(const json& p) {
  recombinant::TailDistribution dist;
  dist.family = recombinant::parse_family(p.at("family").get<std::string>());
  const auto values = numbers(p, "dist_params");
  const std::size_t expected =
      (dist.family == recombinant::Family::exponential || dist.family == recombinant::Family::uniform) ? 1 : 2;
  if (values.size() != expected) {
    throw FieldError("dist_params", "family '" + std::string(recombinant::family_name(dist.family)) + "' takes " +
                                        std::to_string(expected) + " parameter(s)");
  }
  dist.p1 = values[0];
  if (expected == 2) dist.p2 = values[1];
  as_field("dist_params", [&] { dist.validate(); });
  return dist;
}

gravity::NeedsState build_needs(const json& p) {
  gravity::NeedsState state;
  const auto needs = numbers(p, "needs");
  const auto potentials = numbers(p, "potentials");
  const auto rows = p.at("distances");
  if (needs.empty()) throw FieldError("needs", "must be non-empty");
  if (potentials.empty()) throw FieldError("potentials", "must be non-empty");
  if (rows.size() != needs.size()) throw FieldError("distances", "must have one row per need");
  state.n_vec = to_vector(needs);
  state.p_vec = to_vector(potentials);
  state.d_mat.resize(static_cast<Eigen::Index>(needs.size()), static_cast<Eigen::Index>(potentials.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != potentials.size()) throw FieldError("distances", "must have one column per sector");
    for (std::size_t j = 0; j < potentials.size(); ++j) {
      state.d_mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
  }
  state.g_resp = num(p, "g_resp");
  state.alpha_g = num(p, "alpha_g");
  state.beta_g = num(p, "beta_g");
  as_field("distances", [&] { state.validate(); });
  return state;
}

gravity::FlywheelOptions build_flywheel(const json& p, std::size_t n_needs) {
  gravity::FlywheelOptions opt;
  opt.horizon = count(p, "horizon");
  opt.kappa = num(p, "kappa");
  opt.blind_shares = numbers(p, "blind_shares");
  opt.coverage_weights = numbers(p, "coverage_weights");
  opt.satisfied_tol = num(p, "satisfied_tol");
  if (!opt.blind_shares.empty()) {
    if (opt.blind_shares.size() != n_needs) throw FieldError("blind_shares", "must have one entry per need");
    double total = 0.0;
    for (double s : opt.blind_shares) total += s;
    if (std::abs(total - 1.0) > 1e-9) throw FieldError("blind_shares", "must sum to 1");
  }
  const auto& weights = opt.coverage_weights.empty() ? numbers(p, "needs") : opt.coverage_weights;
  if (weights.size() != n_needs) throw FieldError("coverage_weights", "must have one entry per need");
  if (std::none_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; })) {
    throw FieldError("coverage_weights", "must not all be zero");
  }
  return opt;
}

dynprog::MdpSpec build_mdp(const json& p) {
  dynprog::MdpSpec spec;
  spec.n_states = count(p, "n_states");
  spec.n_actions = count(p, "n_actions");
  spec.beta = num(p, "beta");

  const json& rewards = p.at("rewards");
  if (rewards.size() != spec.n_states) throw FieldError("rewards", "must have n_states rows");
  for (const auto& row : rewards) {
    if (row.size() != spec.n_actions) throw FieldError("rewards", "must have n_actions columns");
    for (const auto& r : row) spec.rewards.push_back(r.get<double>());
  }

  const json& shocks = p.at("shocks");
  if (shocks.empty()) throw FieldError("shocks", "must be non-empty");
  for (std::size_t k = 0; k < shocks.size(); ++k) {
    const std::string where = "shocks[" + std::to_string(k) + "]";
    require_keys(shocks[k], {"probability", "label"}, where);
    dynprog::Shock shock;
    shock.probability = object_number(shocks[k], "probability", where);
    if (shocks[k].contains("label")) {
      if (!shocks[k]["label"].is_string()) throw FieldError(where + ".label", "expected string");
      shock.label = shocks[k]["label"].get<std::string>();
    }
    spec.shocks.push_back(std::move(shock));
  }

  const json& transitions = p.at("transitions");
  if (transitions.size() != spec.n_states) throw FieldError("transitions", "must have n_states entries");
  for (const auto& per_state : transitions) {
    if (per_state.size() != spec.n_actions) throw FieldError("transitions", "must have n_actions entries per state");
    for (const auto& per_action : per_state) {
      if (per_action.size() != spec.shocks.size()) {
        throw FieldError("transitions", "must have one next state per shock");
      }
      for (const auto& next : per_action) spec.transition.push_back(next.get<std::size_t>());
    }
  }
  as_field("shocks", [&] { spec.validate(); });

  const auto legacy = p.at("legacy_policy");
  if (!legacy.empty()) {
    if (legacy.size() != spec.n_states) throw FieldError("legacy_policy", "must have one action per state");
    for (const auto& a : legacy) {
      if (a.get<std::int64_t>() < 0 || a.get<std::size_t>() >= spec.n_actions) {
        throw FieldError("legacy_policy", "action out of range");
      }
    }
  }
  return spec;
}

feedback::FeedbackParams build_feedback(const json& p, std::uint64_t seed) {
  feedback::FeedbackParams fp;
  fp.gamma0 = num(p, "gamma0");
  fp.theta_meta = num(p, "theta_meta");
  fp.phi_gain = num(p, "phi_gain");
  fp.noise_sd = num(p, "noise_sd");
  fp.e_target.constant = num(p, "e_target");
  fp.e_target.times = numbers(p, "e_target_times");
  fp.e_target.values = numbers(p, "e_target_values");
  fp.o0 = num(p, "o0");
  fp.a0 = num(p, "a0");
  fp.dt = num(p, "dt");
  fp.horizon = count(p, "horizon");
  fp.seed = seed;
  as_field("e_target_times", [&] { fp.validate(); });
  return fp;
}

game::StageGame build_game(const json& p) {
  game::StageGame g;
  g.n_players = count(p, "n_players");
  g.payoff_cc = num(p, "payoff_cc");
  g.payoff_defector = num(p, "payoff_defector");
  g.payoff_victim = num(p, "payoff_victim");
  g.payoff_dd = num(p, "payoff_dd");
  g.p_disc = num(p, "p_disc");
  g.delta_disc = num(p, "delta_disc");
  g.horizon = count(p, "horizon");
  g.penalty_mode =
      p.at("penalty_mode").get<std::string>() == "lexicographic" ? game::PenaltyMode::lexicographic
                                                                  : game::PenaltyMode::finite;
  g.omega = num(p, "omega");
  as_field("n_players", [&] { g.validate(); });
  return g;
}

game::StrategyClass strategy_class(const json& p) {
  return p.at("strategy_class").get<std::string>() == "open_loop" ? game::StrategyClass::open_loop
                                                                   : game::StrategyClass::memory_one;
}

policy::SubsidyProblem build_subsidy(const json& p) {
  policy::SubsidyProblem problem;
  problem.budget = num(p, "budget");
  const json& occupations = p.at("occupations");
  if (occupations.empty()) throw FieldError("occupations", "must be non-empty");
  for (std::size_t i = 0; i < occupations.size(); ++i) {
    const std::string where = "occupations[" + std::to_string(i) + "]";
    require_keys(occupations[i], {"w", "l_bar", "eta", "lambda_align"}, where);
    policy::Occupation occ;
    occ.w = object_number(occupations[i], "w", where);
    occ.l_bar = object_number(occupations[i], "l_bar", where);
    occ.eta = object_number(occupations[i], "eta", where);
    occ.lambda_align = object_number(occupations[i], "lambda_align", where);
    as_field(where, [&] { occ.validate(); });
    problem.occupations.push_back(occ);
  }
  return problem;
}

std::vector<policy::IdeaRecord> build_ideas(const json& p) {
  std::vector<policy::IdeaRecord> ideas;
  const json& list = p.at("ideas");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "ideas[" + std::to_string(i) + "]";
    require_keys(list[i], {"id", "u_emt", "feasible"}, where);
    policy::IdeaRecord idea;
    if (!list[i].contains("id") || !list[i]["id"].is_string()) throw FieldError(where + ".id", "required string");
    idea.id = list[i]["id"].get<std::string>();
    idea.u_emt = object_number(list[i], "u_emt", where);
    if (list[i].contains("feasible")) {
      if (!list[i]["feasible"].is_boolean()) throw FieldError(where + ".feasible", "expected boolean");
      idea.feasible = list[i]["feasible"].get<bool>();
    }
    ideas.push_back(std::move(idea));
  }
  return ideas;
}

std::optional<policy::NeedsKnowledgeLink> build_link(const json& p) {
  const auto needs = numbers(p, "needs_vector");
  const json& items = p.at("knowledge_items");
  if (needs.empty() && items.empty()) return std::nullopt;
  policy::NeedsKnowledgeLink link;
  link.needs = to_vector(needs);
  link.threshold = num(p, "activation_threshold");
  for (const auto& item : items) {
    if (item.size() != needs.size()) throw FieldError("knowledge_items", "dimension must match needs_vector");
    link.knowledge_items.push_back(to_vector(item.get<std::vector<double>>()));
  }
  return link;
}

// ------------------------------------------------------------------ output

fs::path artifact_path(const ScenarioConfig& cfg, const fs::path& out_dir, const std::string& suffix,
                       const std::string& ext) {
  return out_dir / (cfg.output.path + suffix + "." + ext);
}

void write_json(const fs::path& path, const json& doc) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
}

void write_csv(const fs::path& path, const CsvTable& table) {
  fs::create_directories(path.parent_path());
  table.write(path);
}

// ---------------------------------------------------------------- runners

void run_epistemic(const ScenarioConfig& cfg, const fs::path& out_dir, RunReport& report) {
  const json& p = cfg.params;
  const auto ep = build_epistemic(p);
  const double dt = num(p, "dt");
  const std::size_t horizon = count(p, "horizon");
  const double a0 = num(p, "a_cap0");
  const double a_growth = num(p, "a_growth");
  const double complexity_mean = num(p, "complexity_mean");
  auto capability = [&](double t) { return a0 + a_growth * t; };

  Rng rng(derive_stream(cfg.seed, 0));
  epistemic::ProblemPool pool;
  pool.eta_rate = num(p, "eta_rate");
  pool.lambda_align = num(p, "lambda_align");
  pool.eps_floor = num(p, "eps_floor");
  for (std::size_t i = 0; i < count(p, "initial_problems"); ++i) {
    pool.problems.push_back({i, rng.exponential(1.0 / complexity_mean), true});
  }

  CsvTable table({"t", "P", "theta", "C", "pi", "inverted", "R", "pool_size", "surplus"});
  auto state = epistemic::make_state(0.0, num(p, "p0"), capability(0.0), ep);
  bool threshold_ok = true;
  bool pi_monotone = true;
  double last_pi = state.pi;

  for (std::size_t k = 0;; ++k) {
    const auto output = epistemic::research_output(pool, state.a_cap);
    const bool surplus = output.r > pool.eta_rate;
    table.cell(state.t).cell(state.p).cell(state.theta).cell(state.c).cell(state.pi).cell(state.inverted)
        .cell(output.r).cell(static_cast<std::uint64_t>(pool.open_count())).cell(surplus);
    table.end_row();

    threshold_ok = threshold_ok && ((state.theta == ep.eps_resid) == (state.p >= ep.p_bar));
    pi_monotone = pi_monotone && state.pi >= last_pi;
    last_pi = state.pi;
    if (k == horizon) break;

    auto next = epistemic::step_knowledge(state, ep, dt);
    // Use the step index for t so the time grid does not drift.
    next.t = static_cast<double>(k + 1) * dt;
    state = epistemic::with_capability(next, capability(next.t), ep);
    pool = epistemic::step_problem_pool(pool, output, dt, rng, complexity_mean).pool;
  }

  const auto path = artifact_path(cfg, out_dir, "", "csv");
  write_csv(path, table);
  report.artifacts.push_back(path);
  report.checks.push_back({"threshold_semantics", threshold_ok, "theta == eps_resid exactly when P >= p_bar"});
  report.checks.push_back({"pi_non_decreasing", pi_monotone, "discovery probability never falls"});
}

void run_growth(const ScenarioConfig& cfg, const fs::path& out_dir, RunReport& report) {
  const json& p = cfg.params;
  const auto up = build_unified(p);
  const double dt = num(p, "dt");
  const std::size_t horizon = count(p, "horizon");
  const auto delta_obs = numbers(p, "delta_obs");
  const double lambda_step = num(p, "lambda_step");
  const double pi_flow = num(p, "pi_flow");
  const double psi = num(p, "psi");
  const double r_rate = num(p, "r_rate");

  const double mu = growth::free_entry_mu(pi_flow, psi, r_rate);
  const double value = growth::incumbent_value(pi_flow, r_rate, mu);

  growth::UnifiedState state{num(p, "a0"), num(p, "q0"), num(p, "k"), num(p, "l")};
  growth::QualityLadderState ladder;
  ladder.qualities.assign(count(p, "ladder_lines"), 1.0);

  CsvTable table({"t", "A", "Q", "K", "L", "Y", "g", "mu", "V"});
  bool ladder_ok = true;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double g = growth::schumpeter_growth(lambda_step, mu, delta_obs[std::min(k, delta_obs.size() - 1)]);
    table.cell(t).cell(state.a).cell(state.q).cell(state.k).cell(state.l).cell(growth::unified_output(state, up))
        .cell(g).cell(mu).cell(value);
    table.end_row();
    if (k == horizon) break;

    const double c = epistemic::marginal_ideation_cost(num(p, "c0"), num(p, "alpha_cost"),
                                                       num(p, "a_cap0") + num(p, "a_growth") * t);
    state = growth::unified_step(state, up, c, dt).state;

    auto next = growth::ladder_step(ladder, mu, lambda_step, dt, derive_stream(cfg.seed, k));
    for (std::size_t i = 0; i < next.qualities.size(); ++i) {
      ladder_ok = ladder_ok && next.qualities[i] >= ladder.qualities[i] && next.qualities[i] >= 1.0;
    }
    ladder = std::move(next);
  }

  const auto path = artifact_path(cfg, out_dir, "", "csv");
  write_csv(path, table);
  report.artifacts.push_back(path);
  const double residual = std::abs(mu * value - psi);
  report.checks.push_back({"free_entry_consistency", residual < 1e-10, "|mu V - psi| = " + format_double(residual)});
  report.checks.push_back({"ladder_monotone", ladder_ok,
                           "final quality index " + format_double(growth::quality_index(ladder))});
}

void run_evt(const ScenarioConfig& cfg, const fs::path& out_dir, RunReport& report) {
  const json& p = cfg.params;
  const auto dist = build_tail(p);
  recombinant::EvtRunConfig run{static_cast<std::uint64_t>(integer(p, "k_draws")),
                                static_cast<std::uint64_t>(integer(p, "replicates")), cfg.seed};
  const auto m = recombinant::draw_max_statistic(dist, run);
  const auto diag = recombinant::evt_diagnostics(m, num(p, "ks_threshold"));

  const double k = static_cast<double>(run.k_draws);
  const double expected = recombinant::finite_k_mean(k);
  const double band = 3.0 * recombinant::finite_k_stddev(k) / std::sqrt(static_cast<double>(run.replicates));

  const json doc = {{"family", recombinant::family_name(dist.family)},
                    {"K", run.k_draws},
                    {"replicates", run.replicates},
                    {"mean", diag.mean},
                    {"ks", diag.ks_distance},
                    {"pass", diag.pass},
                    {"finite_k_mean", expected},
                    {"finite_k_sd", recombinant::finite_k_stddev(k)},
                    {"asymptotic_mean", 1.0},
                    {"seed", cfg.seed}};

  if (cfg.output.format == "csv") {
    CsvTable table({"replicate", "m"});
    for (std::size_t r = 0; r < m.size(); ++r) {
      table.cell(static_cast<std::uint64_t>(r)).cell(m[r]);
      table.end_row();
    }
    const auto csv_path = artifact_path(cfg, out_dir, "_m_values", "csv");
    write_csv(csv_path, table);
    report.artifacts.push_back(csv_path);
  }
  const auto path = artifact_path(cfg, out_dir, "", "json");
  write_json(path, doc);
  report.artifacts.push_back(path);

  report.checks.push_back({"ks_pass", diag.pass, "KS distance " + format_double(diag.ks_distance)});
  report.checks.push_back({"mean_within_3sigma", std::abs(diag.mean - expected) <= band,
                           "mean " + format_double(diag.mean) + " vs K/(K+1) " + format_double(expected)});
}

void run_gravity(const ScenarioConfig& cfg, const fs::path& out_dir, RunReport& report) {
  const json& p = cfg.params;
  const auto state = build_needs(p);
  const auto options = build_flywheel(p, state.needs());
  const gravity::ProductionInputs production{num(p, "prod_a"), num(p, "prod_k"), num(p, "prod_l"),
                                             num(p, "prod_alpha")};
  const auto result = gravity::flywheel_compare(state, production, options);

  bool dominance = true;
  bool monotone = true;
  for (std::size_t t = 0; t < result.u_blind.size(); ++t) {
    dominance = dominance && result.u_aligned[t] <= result.u_blind[t];
    if (t > 0) {
      monotone = monotone && result.u_blind[t] <= result.u_blind[t - 1] && result.u_aligned[t] <= result.u_aligned[t - 1];
    }
  }
  dominance = dominance && result.u_aligned.back() < result.u_blind.back();

  if (cfg.output.format == "json") {
    const Eigen::MatrixXd flows = gravity::need_sector_flow(state);
    json flow_rows = json::array();
    for (Eigen::Index i = 0; i < flows.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < flows.cols(); ++j) row.push_back(flows(i, j));
      flow_rows.push_back(std::move(row));
    }
    const json doc = {{"flows", flow_rows},
                      {"field", gravity::gravity_field(state)},
                      {"u_blind", result.u_blind},
                      {"u_aligned", result.u_aligned},
                      {"coverage_blind", result.coverage_blind},
                      {"coverage_aligned", result.coverage_aligned},
                      {"Y", result.output}};
    const auto path = artifact_path(cfg, out_dir, "", "json");
    write_json(path, doc);
    report.artifacts.push_back(path);
  } else {
    CsvTable table({"t", "mode", "U", "coverage", "Y"});
    for (std::size_t t = 0; t < result.u_blind.size(); ++t) {
      const auto step = static_cast<std::uint64_t>(t);
      table.cell(step).cell("blind").cell(result.u_blind[t]).cell(result.coverage_blind[t]).cell(result.output[t]);
      table.end_row();
      table.cell(step).cell("aligned").cell(result.u_aligned[t]).cell(result.coverage_aligned[t]).cell(result.output[t]);
      table.end_row();
    }
    const auto path = artifact_path(cfg, out_dir, "", "csv");
    write_csv(path, table);
    report.artifacts.push_back(path);
  }

  report.checks.push_back({"aligned_dominance", dominance,
                           "U_aligned(T) = " + format_double(result.u_aligned.back()) +
                               ", U_blind(T) = " + format_double(result.u_blind.back())});
  report.checks.push_back({"u_non_increasing", monotone, "potential energy never rises in either mode"});
}

void run_mdp(const ScenarioConfig& cfg, const fs::path& out_dir, RunReport& report) {
  const json& p = cfg.params;
  const auto spec = build_mdp(p);
  const double tol = num(p, "tol");
  const auto sol = dynprog::value_iteration(spec, tol, count(p, "max_iter"));

  json doc = {{"values", sol.values},
              {"policy", sol.policy},
              {"iterations", sol.iterations},
              {"residual", sol.residual}};
  doc["path_sensitivity"] = dynprog::path_sensitivity(spec, num(p, "sensitivity_h"));

  report.checks.push_back({"converged", sol.residual <= tol, "residual " + format_double(sol.residual)});
  const auto legacy = p.at("legacy_policy").get<std::vector<std::size_t>>();
  if (!legacy.empty()) {
    const auto surplus = dynprog::realtime_surplus(spec, legacy);
    doc["realtime_surplus"] = surplus;
    const double worst = *std::min_element(surplus.begin(), surplus.end());
    report.checks.push_back({"surplus_non_negative", worst >= -1e-8, "min surplus " + format_double(worst)});
  }
  const auto path = artifact_path(cfg, out_dir, "", "json");
  write_json(path, doc);
  report.artifacts.push_back(path);
}

void run_feedback(const ScenarioConfig& cfg, const fs::path& out_dir, RunReport& report) {
  const json& p = cfg.params;
  const auto fp = build_feedback(p, cfg.seed);
  const auto traj = feedback::simulate_loop(fp);
  const auto diag = feedback::loop_diagnostics(traj, num(p, "settle_threshold"));

  CsvTable table({"t", "O", "A", "gamma", "eps"});
  bool gamma_ok = true;
  for (const auto& s : traj) {
    table.cell(s.t).cell(s.o_val).cell(s.a_sig).cell(s.gamma).cell(s.eps_err);
    table.end_row();
    gamma_ok = gamma_ok && s.gamma >= 0.0;
  }
  const auto path = artifact_path(cfg, out_dir, "", "csv");
  write_csv(path, table);
  report.artifacts.push_back(path);

  report.checks.push_back({"gamma_non_negative", gamma_ok, "sensitivity clamp holds"});
  const json& expect = p.at("expect_settled");
  if (!expect.is_null()) {
    report.checks.push_back({"settled_matches_expectation", diag.settled == expect.get<bool>(),
                             std::string("settled=") + (diag.settled ? "true" : "false") +
                                 ", tail max |eps| = " + format_double(diag.max_abs_eps)});
  }
}

json strategy_json(const game::Profile& profile) {
  json out = json::array();
  for (const auto& s : profile) out.push_back(s.to_string());
  return out;
}

json evaluation_json(const game::OutcomeEvaluation& eval) {
  json lex = json::array();
  for (const auto& v : eval.lexicographic) lex.push_back({{"discontinuity", v.discontinuity}, {"payoff", v.payoff}});
  return {{"expected_payoffs", eval.expected_payoffs}, {"continuity_prob", eval.continuity_prob}, {"lexicographic", lex}};
}

void run_game(const ScenarioConfig& cfg, const fs::path& out_dir, RunReport& report) {
  const json& p = cfg.params;
  const auto g = build_game(p);
  const auto kind = strategy_class(p);
  const auto result = game::spne_search(g, kind);

  json equilibria = json::array();
  for (const auto& profile : result.equilibria) equilibria.push_back(strategy_json(profile));
  const json doc = {
      {"strategy_class", p.at("strategy_class")},
      {"penalty_mode", p.at("penalty_mode")},
      {"profiles_checked", result.profiles_checked},
      {"all_c_is_spne", result.all_c_is_spne},
      {"all_d_is_spne", result.all_d_is_spne},
      {"all_c_evaluation", evaluation_json(game::evaluate_profile(g, game::constant_profile(kind, g, false)))},
      {"all_d_evaluation", evaluation_json(game::evaluate_profile(g, game::constant_profile(kind, g, true)))},
      {"equilibria", equilibria}};
  const auto path = artifact_path(cfg, out_dir, "", "json");
  write_json(path, doc);
  report.artifacts.push_back(path);

  auto expectation = [&](const char* key, bool actual, const char* check) {
    const json& e = p.at(key);
    if (e.is_null()) return;
    report.checks.push_back({check, actual == e.get<bool>(), std::string("observed ") + (actual ? "true" : "false")});
  };
  expectation("expect_all_c_spne", result.all_c_is_spne, "all_c_expectation");
  expectation("expect_all_d_spne", result.all_d_is_spne, "all_d_expectation");
}

void run_policy(const ScenarioConfig& cfg, const fs::path& out_dir, RunReport& report) {
  const json& p = cfg.params;
  const auto problem = build_subsidy(p);
  const double tol = num(p, "tol");
  const auto sol = policy::optimize_subsidies(problem, tol);

  json doc = {{"s_star", sol.s_star},
              {"objective", sol.objective},
              {"spend", sol.spend},
              {"multiplier", sol.multiplier},
              {"kkt_residual", sol.kkt_residual}};
  if (!sol.note.empty()) doc["note"] = sol.note;

  const auto ideas = build_ideas(p);
  if (!ideas.empty()) {
    json kept = json::array();
    for (const auto& idea : policy::governance_filter(ideas, num(p, "delta_thresh"))) kept.push_back(idea.id);
    doc["governance_selected"] = kept;
    if (std::any_of(ideas.begin(), ideas.end(), [](const auto& i) { return i.feasible; })) {
      doc["demanduction_choice"] = ideas[policy::demanduct_select(ideas)].id;
    }
  }
  if (const auto link = build_link(p)) doc["exduction_active"] = policy::exduct(*link);
  const auto series = numbers(p, "utility_series");
  if (!series.empty()) {
    doc["recursive_utility"] = policy::recursive_utility(series, num(p, "utility_beta"), num(p, "utility_tail"));
  }

  if (cfg.output.format == "csv") {
    auto budgets = numbers(p, "sweep_budgets");
    if (budgets.empty()) budgets.push_back(problem.budget);
    CsvTable table({"B", "objective", "spend"});
    for (double b : budgets) {
      policy::SubsidyProblem swept = problem;
      double objective = 0.0;
      double spend = 0.0;
      if (b > 0.0) {
        swept.budget = b;
        const auto s = policy::optimize_subsidies(swept, tol);
        objective = s.objective;
        spend = s.spend;
      } else {
        const std::vector<double> zero(problem.occupations.size(), 0.0);
        objective = policy::subsidy_objective(problem, zero);
      }
      table.cell(b).cell(objective).cell(spend);
      table.end_row();
    }
    const auto csv_path = artifact_path(cfg, out_dir, "_sweep", "csv");
    write_csv(csv_path, table);
    report.artifacts.push_back(csv_path);
  }
  const auto path = artifact_path(cfg, out_dir, "", "json");
  write_json(path, doc);
  report.artifacts.push_back(path);

  const bool all_active = std::all_of(problem.occupations.begin(), problem.occupations.end(),
                                      [](const auto& o) { return o.lambda_align * o.eta > 0.0; });
  if (all_active) {
    report.checks.push_back({"budget_binds", std::abs(sol.spend - problem.budget) <= tol * problem.budget,
                             "spend " + format_double(sol.spend) + " of " + format_double(problem.budget)});
  }
  report.checks.push_back({"kkt_stationarity", sol.kkt_residual <= tol, "residual " + format_double(sol.kkt_residual)});
}

}  // namespace

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

json RunReport::to_json() const {
  json artifact_list = json::array();
  for (const auto& a : artifacts) artifact_list.push_back(a.string());
  json check_list = json::array();
  for (const auto& c : checks) check_list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"scenario", scenario},       {"module", module},   {"wall_seconds", wall_seconds},
          {"artifacts", artifact_list}, {"checks", check_list}, {"passed", passed()},
          {"version", version},         {"config_digest", config_digest}};
}

std::vector<std::string> validate_module_params(const std::string& module, const json& params) {
  try {
    if (module == "epistemic") {
      (void)build_epistemic(params);
    } else if (module == "growth") {
      (void)build_unified(params);
    } else if (module == "evt") {
      (void)build_tail(params);
    } else if (module == "gravity") {
      const auto state = build_needs(params);
      (void)build_flywheel(params, state.needs());
    } else if (module == "mdp") {
      (void)build_mdp(params);
    } else if (module == "feedback") {
      (void)build_feedback(params, 0);
    } else if (module == "game") {
      (void)build_game(params);
    } else if (module == "policy") {
      (void)build_subsidy(params);
      (void)build_ideas(params);
      (void)build_link(params);
    }
  } catch (const FieldError& e) {
    return {e.what()};
  } catch (const ConfigError& e) {
    return {e.what()};
  } catch (const std::exception& e) {
    return {std::string("invalid parameters: ") + e.what()};
  }
  return {};
}

RunReport run_scenario(const ScenarioConfig& cfg, const fs::path& out_dir) {
  RunReport report;
  report.scenario = cfg.name;
  report.module = cfg.module;
  report.config_digest = cfg.digest();
  const auto start = std::chrono::steady_clock::now();

  try {
    if (cfg.module == "epistemic") {
      run_epistemic(cfg, out_dir, report);
    } else if (cfg.module == "growth") {
      run_growth(cfg, out_dir, report);
    } else if (cfg.module == "evt") {
      run_evt(cfg, out_dir, report);
    } else if (cfg.module == "gravity") {
      run_gravity(cfg, out_dir, report);
    } else if (cfg.module == "mdp") {
      run_mdp(cfg, out_dir, report);
    } else if (cfg.module == "feedback") {
      run_feedback(cfg, out_dir, report);
    } else if (cfg.module == "game") {
      run_game(cfg, out_dir, report);
    } else if (cfg.module == "policy") {
      run_policy(cfg, out_dir, report);
    } else {
      throw ConfigError("unknown module '" + cfg.module + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error("scenario '" + cfg.name + "' (" + cfg.module + "): " + e.what());
  }

  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<fs::path> bundled_scenarios(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) throw ConfigError("scenario directory not found: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool VerifyResult::passed() const {
  const auto ok = [](const auto& c) { return c.passed; };
  return std::all_of(determinism.begin(), determinism.end(), ok) &&
         std::all_of(reports.begin(), reports.end(), [](const RunReport& r) { return r.passed(); });
}

namespace {

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

VerifyResult verify_bundled(const fs::path& scenario_dir, const fs::path& out_dir, int jobs) {
  const auto paths = bundled_scenarios(scenario_dir);
  std::vector<ScenarioConfig> configs;
  for (const auto& path : paths) configs.push_back(load_config(path));

  VerifyResult result;
  result.reports.resize(configs.size());
  result.determinism.resize(configs.size());
  std::vector<std::string> failures(configs.size());
  const auto n = static_cast<std::int64_t>(configs.size());

#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto& cfg = configs[idx];
    try {
      auto first = run_scenario(cfg, out_dir / "run1");
      auto second = run_scenario(cfg, out_dir / "run2");
      bool same = first.artifacts.size() == second.artifacts.size() && cfg.digest() == load_config(paths[idx]).digest();
      for (std::size_t a = 0; same && a < first.artifacts.size(); ++a) {
        same = read_bytes(first.artifacts[a]) == read_bytes(second.artifacts[a]);
      }
      result.determinism[idx] = {cfg.name + ":determinism", same, same ? "byte-identical rerun" : "outputs differ"};
      result.reports[idx] = std::move(first);
    } catch (const std::exception& e) {
      failures[idx] = e.what();
      result.reports[idx].scenario = cfg.name;
      result.reports[idx].module = cfg.module;
      result.reports[idx].checks.push_back({"run", false, e.what()});
      result.determinism[idx] = {cfg.name + ":determinism", false, "run failed"};
    }
  }
  return result;
}

}  // namespace emt::harness

#include "emt/harness/schema.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emt/errors.hpp"

namespace emt::harness {

namespace {

std::string fmt(double v) {
  json j = v;
  return j.dump();
}

Constraint greater_than(double bound) {
  return [bound](const json& v) -> std::optional<std::string> {
    if (v.get<double>() > bound) return std::nullopt;
    return "must be > " + fmt(bound);
  };
}

Constraint at_least(double bound) {
  return [bound](const json& v) -> std::optional<std::string> {
    if (v.get<double>() >= bound) return std::nullopt;
    return "must be >= " + fmt(bound);
  };
}

Constraint closed_range(double lo, double hi) {
  return [lo, hi](const json& v) -> std::optional<std::string> {
    const double x = v.get<double>();
    if (x >= lo && x <= hi) return std::nullopt;
    return "must lie in [" + fmt(lo) + ", " + fmt(hi) + "]";
  };
}

Constraint open_range(double lo, double hi) {
  return [lo, hi](const json& v) -> std::optional<std::string> {
    const double x = v.get<double>();
    if (x > lo && x < hi) return std::nullopt;
    return "must lie in (" + fmt(lo) + ", " + fmt(hi) + ")";
  };
}

Constraint one_of(std::vector<std::string> options) {
  return [options](const json& v) -> std::optional<std::string> {
    const auto s = v.get<std::string>();
    if (std::find(options.begin(), options.end(), s) != options.end()) return std::nullopt;
    std::string msg = "must be one of";
    for (const auto& o : options) msg += " '" + o + "'";
    return msg;
  };
}

Constraint all_at_least(double bound) {
  return [bound](const json& v) -> std::optional<std::string> {
    for (const auto& x : v) {
      if (!(x.get<double>() >= bound)) return "entries must be >= " + fmt(bound);
    }
    return std::nullopt;
  };
}

Constraint all_greater(double bound) {
  return [bound](const json& v) -> std::optional<std::string> {
    for (const auto& row : v) {
      for (const auto& x : row) {
        if (!(x.get<double>() > bound)) return "entries must be > " + fmt(bound);
      }
    }
    return std::nullopt;
  };
}

ParamSpec num(std::string name, double def, std::string desc, Constraint c = {}) {
  return {std::move(name), ParamKind::number, def, std::move(desc), std::move(c)};
}

ParamSpec integer(std::string name, std::int64_t def, std::string desc, Constraint c = {}) {
  return {std::move(name), ParamKind::integer, def, std::move(desc), std::move(c)};
}

ParamSpec required(std::string name, ParamKind kind, std::string desc, Constraint c = {}) {
  return {std::move(name), kind, nullptr, std::move(desc), std::move(c), true};
}

ParamSpec with_default(std::string name, ParamKind kind, json def, std::string desc, Constraint c = {}) {
  return {std::move(name), kind, std::move(def), std::move(desc), std::move(c)};
}

std::vector<ModuleSchema> build_schemas() {
  std::vector<ModuleSchema> all;

  all.push_back({"epistemic",
                 {"csv"},
                 {
                     num("theta0", 5.0, "baseline uncertainty", greater_than(0)),
                     num("p_bar", 20.0, "knowledge threshold for the mode transition", greater_than(0)),
                     num("eps_resid", 0.01, "residual uncertainty once P >= p_bar", at_least(0)),
                     num("alpha_prod", 0.5, "ideation productivity in dP/dt", at_least(0)),
                     num("phi_elast", 1.0, "AI elasticity in dP/dt", at_least(0)),
                     num("c0", 100.0, "baseline ideation cost", greater_than(0)),
                     num("alpha_cost", 1.0, "cost sensitivity to AI capability", at_least(0)),
                     num("theta_star", 10.0, "inversion threshold on ideation cost", greater_than(0)),
                     num("lp", 1.0, "research labour", at_least(0)),
                     num("p0", 0.0, "initial knowledge stock", at_least(0)),
                     num("a_cap0", 1.0, "AI capability at t = 0", at_least(0)),
                     num("a_growth", 0.5, "linear AI capability growth per unit time", at_least(0)),
                     num("dt", 0.1, "time step", greater_than(0)),
                     integer("horizon", 300, "number of steps", at_least(1)),
                     num("eta_rate", 2.0, "problem emergence rate", at_least(0)),
                     num("lambda_align", 0.8, "alignment coefficient", closed_range(0, 1)),
                     num("eps_floor", 1e-6, "irreducible uncertainty in the solve probability", greater_than(0)),
                     integer("initial_problems", 20, "open problems at t = 0", at_least(0)),
                     num("complexity_mean", 5.0, "mean of the exponential problem complexity", greater_than(0)),
                 }});

  all.push_back({"growth",
                 {"csv"},
                 {
                     num("phi_y", 0.3, "output elasticity of process knowledge", greater_than(0)),
                     num("gamma_y", 0.3, "output elasticity of product quality", greater_than(0)),
                     num("beta_y", 0.33, "capital share", open_range(0, 1)),
                     num("delta_a", 0.05, "process innovation productivity", greater_than(0)),
                     num("delta_q", 0.04, "product innovation productivity", greater_than(0)),
                     num("alpha_a", 0.1, "process feedback coefficient", at_least(0)),
                     num("alpha_q", 0.05, "product feedback coefficient", at_least(0)),
                     num("l_a", 1.0, "process research labour", at_least(0)),
                     num("l_q", 1.0, "product research labour", at_least(0)),
                     num("lambda1", 1.0, "composite weight on dA/dt", at_least(0)),
                     num("lambda2", 1.0, "composite weight on dQ/dt", at_least(0)),
                     num("a0", 1.0, "initial process knowledge", greater_than(0)),
                     num("q0", 1.0, "initial product quality", greater_than(0)),
                     num("k", 10.0, "capital", at_least(0)),
                     num("l", 5.0, "labour", at_least(0)),
                     num("c0", 1.0, "baseline ideation cost", greater_than(0)),
                     num("alpha_cost", 0.5, "cost sensitivity to AI capability", at_least(0)),
                     num("a_cap0", 1.0, "AI capability at t = 0", at_least(0)),
                     num("a_growth", 0.1, "linear AI capability growth per unit time", at_least(0)),
                     num("lambda_step", 1.5, "quality step per innovation", greater_than(1)),
                     num("psi", 0.5, "R&D entry cost", greater_than(0)),
                     num("r_rate", 0.05, "interest rate", greater_than(0)),
                     num("pi_flow", 1.0, "monopoly flow profit", greater_than(0)),
                     with_default("delta_obs", ParamKind::number_list, json::array({0.0}),
                                  "obsolescence burden per step; the last entry is held", all_at_least(0)),
                     num("dt", 0.1, "time step", greater_than(0)),
                     integer("horizon", 200, "number of steps", at_least(1)),
                     integer("ladder_lines", 1000, "product lines on the discretised quality continuum", at_least(1)),
                 }});

  all.push_back({"evt",
                 {"json", "csv"},
                 {
                     with_default("family", ParamKind::string, "exponential", "tail family",
                                  one_of({"exponential", "uniform", "pareto", "lognormal", "weibull"})),
                     with_default("dist_params", ParamKind::number_list, json::array({1.0}),
                                  "family parameters: exponential [rate], uniform [b], pareto [xm, shape], "
                                  "lognormal [mu, sigma], weibull [scale, shape]"),
                     integer("k_draws", 1000, "idea draws per replicate", at_least(1)),
                     integer("replicates", 2000, "Monte Carlo replicates", at_least(1)),
                     num("ks_threshold", 0.05, "pass bound on the KS distance to Exp(1)", greater_than(0)),
                 }});

  all.push_back({"gravity",
                 {"csv", "json"},
                 {
                     required("needs", ParamKind::number_list, "need intensities N_i", all_at_least(0)),
                     required("distances", ParamKind::matrix, "need-to-sector distances D_ij", all_greater(0)),
                     required("potentials", ParamKind::number_list, "sector potentials P_j", all_at_least(0)),
                     num("g_resp", 1.0, "system responsiveness G", at_least(0)),
                     num("alpha_g", 1.0, "need elasticity", at_least(0)),
                     num("beta_g", 1.0, "distance elasticity", at_least(0)),
                     num("prod_a", 1.0, "TFP in the production function", at_least(0)),
                     num("prod_k", 1.0, "capital", at_least(0)),
                     num("prod_l", 1.0, "labour", at_least(0)),
                     num("prod_alpha", 0.33, "capital share", open_range(0, 1)),
                     num("kappa", 0.1, "satisfaction efficiency", at_least(0)),
                     integer("horizon", 50, "number of steps", at_least(1)),
                     with_default("blind_shares", ParamKind::number_list, json::array(),
                                  "needs-ignorant allocation shares; empty means uniform", all_at_least(0)),
                     with_default("coverage_weights", ParamKind::number_list, json::array(),
                                  "need importance weights; empty means initial intensities", all_at_least(0)),
                     num("satisfied_tol", 1e-12, "intensity at or below which a need counts as satisfied",
                         at_least(0)),
                 }});

  all.push_back({"mdp",
                 {"json"},
                 {
                     required("n_states", ParamKind::integer, "number of states", at_least(1)),
                     required("n_actions", ParamKind::integer, "number of actions", at_least(1)),
                     required("rewards", ParamKind::matrix, "reward table r(s, a)"),
                     required("shocks", ParamKind::object_list, "shock support [{probability, label}]"),
                     required("transitions", ParamKind::tensor3, "next state [s][a][shock]"),
                     num("beta", 0.9, "discount factor", open_range(0, 1)),
                     num("tol", 1e-10, "Bellman residual bound", greater_than(0)),
                     integer("max_iter", 1000000, "iteration cap", at_least(1)),
                     with_default("legacy_policy", ParamKind::integer_list, json::array(),
                                  "fixed legacy policy for the real-time surplus; empty skips it"),
                     num("sensitivity_h", 1e-3, "step of the uniform reward-offset sensitivity", greater_than(0)),
                 }});

  all.push_back({"feedback",
                 {"csv"},
                 {
                     num("gamma0", 1.0, "initial sensitivity", at_least(0)),
                     num("theta_meta", 0.0, "meta-learning rate (signed)"),
                     num("phi_gain", 1.0, "linear gain of phi(A)"),
                     num("noise_sd", 0.0, "standard deviation of the output noise", at_least(0)),
                     num("e_target", 1.0, "constant target (used when no table is given)"),
                     with_default("e_target_times", ParamKind::number_list, json::array(), "target table times"),
                     with_default("e_target_values", ParamKind::number_list, json::array(), "target table values"),
                     num("o0", 0.0, "initial ideation output"),
                     num("a0", 0.0, "initial alignment signal"),
                     num("dt", 1e-3, "time step", greater_than(0)),
                     integer("horizon", 6284, "number of steps", at_least(1)),
                     num("settle_threshold", 1e-3, "tail |eps| bound for settling", greater_than(0)),
                     with_default("expect_settled", ParamKind::optional_boolean, nullptr,
                                  "embedded check on the settled flag; null disables it"),
                 }});

  all.push_back({"game",
                 {"json"},
                 {
                     integer("n_players", 2, "players", at_least(2)),
                     num("payoff_cc", 2.0, "payoff when everyone cooperates"),
                     num("payoff_defector", 3.0, "payoff to a defector when some others cooperate"),
                     num("payoff_victim", 0.0, "payoff to a cooperator when someone defects"),
                     num("payoff_dd", 1.0, "payoff when everyone defects"),
                     num("p_disc", 0.0, "discontinuity probability per defection", closed_range(0, 1)),
                     num("delta_disc", 0.9, "discount factor", open_range(0, 1)),
                     integer("horizon", 2, "rounds", at_least(1)),
                     with_default("penalty_mode", ParamKind::string, "finite", "discontinuity penalty",
                                  one_of({"lexicographic", "finite"})),
                     num("omega", 0.0, "finite penalty on discontinuity",
                         [](const json& v) -> std::optional<std::string> {
                           if (v.get<double>() <= 0.0) return std::nullopt;
                           return "must be <= 0";
                         }),
                     with_default("strategy_class", ParamKind::string, "memory_one", "enumerated strategy class",
                                  one_of({"memory_one", "open_loop"})),
                     with_default("expect_all_c_spne", ParamKind::optional_boolean, nullptr,
                                  "embedded check on all-C; null disables it"),
                     with_default("expect_all_d_spne", ParamKind::optional_boolean, nullptr,
                                  "embedded check on all-D; null disables it"),
                 }});

  all.push_back({"policy",
                 {"json", "csv"},
                 {
                     required("occupations", ParamKind::object_list, "[{w, l_bar, eta, lambda_align}]"),
                     required("budget", ParamKind::number, "subsidy budget B", greater_than(0)),
                     num("tol", 1e-9, "budget and KKT tolerance", greater_than(0)),
                     with_default("sweep_budgets", ParamKind::number_list, json::array(),
                                  "budgets for the CSV sweep; empty means just `budget`", all_at_least(0)),
                     with_default("ideas", ParamKind::object_list, json::array(), "[{id, u_emt, feasible}]"),
                     num("delta_thresh", 0.0, "governance threshold on u_emt"),
                     with_default("needs_vector", ParamKind::number_list, json::array(), "needs vector for exduction"),
                     with_default("knowledge_items", ParamKind::matrix, json::array(),
                                  "knowledge vectors for exduction"),
                     num("activation_threshold", 0.5, "exduction inner-product threshold"),
                     with_default("utility_series", ParamKind::number_list, json::array(),
                                  "per-period utilities for the recursive utility"),
                     num("utility_beta", 0.95, "recursive utility discount", open_range(0, 1)),
                     num("utility_tail", 0.0, "constant utility after the series ends"),
                 }});
  return all;
}

const std::vector<ModuleSchema>& schemas() {
  static const std::vector<ModuleSchema> all = build_schemas();
  return all;
}

}  // namespace

std::string_view kind_name(ParamKind kind) noexcept {
  switch (kind) {
    case ParamKind::number: return "number";
    case ParamKind::integer: return "integer";
    case ParamKind::boolean: return "boolean";
    case ParamKind::optional_boolean: return "boolean|null";
    case ParamKind::string: return "string";
    case ParamKind::number_list: return "number[]";
    case ParamKind::integer_list: return "integer[]";
    case ParamKind::matrix: return "number[][]";
    case ParamKind::tensor3: return "integer[][][]";
    case ParamKind::object_list: return "object[]";
  }
  return "unknown";
}

const ParamSpec* ModuleSchema::find(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const std::vector<std::string>& module_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& s : schemas()) out.push_back(s.module);
    return out;
  }();
  return names;
}

const ModuleSchema& schema_for(std::string_view module) {
  for (const auto& s : schemas()) {
    if (s.module == module) return s;
  }
  std::string msg = "unknown module '" + std::string(module) + "'";
  if (auto hint = closest_key(module, module_names())) msg += " (did you mean '" + *hint + "'?)";
  throw ConfigError(msg);
}

json schema_json(const ModuleSchema& schema) {
  json params = json::array();
  for (const auto& p : schema.params) {
    json entry = {{"name", p.name}, {"type", kind_name(p.kind)}, {"description", p.description}};
    if (p.required) {
      entry["required"] = true;
    } else {
      entry["default"] = p.default_value;
    }
    params.push_back(std::move(entry));
  }
  return {{"module", schema.module}, {"output_formats", schema.output_formats}, {"params", params}};
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::optional<std::string> closest_key(std::string_view key, const std::vector<std::string>& candidates) {
  std::optional<std::string> best;
  std::size_t best_d = 3;
  for (const auto& c : candidates) {
    const std::size_t d = edit_distance(key, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best || key.size() < 3) return best;
  // A truncated name such as "lambda" for "lambda_align".
  for (const auto& c : candidates) {
    if (c.size() > key.size() && std::string_view(c).substr(0, key.size()) == key) return c;
  }
  return best;
}

namespace {

bool is_number_list(const json& v) {
  return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); });
}

bool is_integer_list(const json& v) {
  return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number_integer(); });
}

}  // namespace

std::optional<std::string> check_kind(ParamKind kind, const json& value) {
  const std::string expected = "expected " + std::string(kind_name(kind));
  switch (kind) {
    case ParamKind::number:
      if (value.is_number() && std::isfinite(value.get<double>())) return std::nullopt;
      return expected;
    case ParamKind::integer:
      if (value.is_number_integer()) return std::nullopt;
      return expected;
    case ParamKind::boolean:
      if (value.is_boolean()) return std::nullopt;
      return expected;
    case ParamKind::optional_boolean:
      if (value.is_boolean() || value.is_null()) return std::nullopt;
      return expected;
    case ParamKind::string:
      if (value.is_string()) return std::nullopt;
      return expected;
    case ParamKind::number_list:
      if (is_number_list(value)) return std::nullopt;
      return expected;
    case ParamKind::integer_list:
      if (is_integer_list(value)) return std::nullopt;
      return expected;
    case ParamKind::matrix: {
      if (!value.is_array()) return expected;
      for (const auto& row : value) {
        if (!is_number_list(row)) return expected;
        if (row.size() != value.front().size()) return "matrix rows must have equal length";
      }
      return std::nullopt;
    }
    case ParamKind::tensor3: {
      if (!value.is_array()) return expected;
      for (const auto& m : value) {
        if (!m.is_array()) return expected;
        for (const auto& row : m) {
          if (!is_integer_list(row)) return expected;
          for (const auto& x : row) {
            if (x.get<std::int64_t>() < 0) return "entries must be non-negative";
          }
        }
      }
      return std::nullopt;
    }
    case ParamKind::object_list:
      if (value.is_array() && std::all_of(value.begin(), value.end(), [](const json& x) { return x.is_object(); })) {
        return std::nullopt;
      }
      return expected;
  }
  return expected;
}

}  // namespace emt::harness

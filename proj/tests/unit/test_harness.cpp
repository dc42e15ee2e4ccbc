#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "emt/errors.hpp"
#include "emt/harness/config.hpp"
#include "emt/harness/csv.hpp"
#include "emt/harness/runner.hpp"
#include "emt/harness/schema.hpp"

using namespace emt::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("emt_harness_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool any_contains(const std::vector<std::string>& messages, const std::string& needle) {
  return std::any_of(messages.begin(), messages.end(),
                     [&](const std::string& m) { return m.find(needle) != std::string::npos; });
}

std::vector<std::string> errors_of(const json& doc) {
  try {
    (void)parse_config(doc);
  } catch (const ConfigValidationError& e) {
    return e.errors();
  }
  return {};
}

}  // namespace

// ------------------------------------------------------------------- CSV

TEST_CASE("csv: quoting follows RFC 4180") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("csv: rows end in CRLF and doubles round-trip") {
  CsvTable t({"x", "flag", "label"});
  const double third = 1.0 / 3.0;
  t.cell(third).cell(true).cell("a,b");
  t.end_row();
  t.cell(std::int64_t{-4}).cell(false).cell(std::string_view("z"));
  t.end_row();
  const std::string text = t.str();
  CHECK(text == "x,flag,label\r\n" + format_double(third) + ",true,\"a,b\"\r\n-4,false,z\r\n");
  CHECK(std::stod(format_double(third)) == third);
  CHECK(format_double(0.1) == "0.1");
  CHECK(t.rows() == 2);
}

TEST_CASE("csv: row width is enforced") {
  CsvTable t({"a", "b"});
  t.cell(1.0);
  CHECK_THROWS_AS(t.end_row(), std::logic_error);
}

// ---------------------------------------------------------------- schema

TEST_CASE("schema: every module has a schema with documented parameters") {
  CHECK(module_names().size() == 8);
  for (const auto& name : module_names()) {
    const auto& s = schema_for(name);
    CHECK(s.module == name);
    CHECK_FALSE(s.output_formats.empty());
    const json doc = schema_json(s);
    CHECK(doc["module"] == name);
    for (const auto& p : s.params) CHECK_FALSE(p.description.empty());
  }
  CHECK_THROWS_AS((void)schema_for("epistemics"), emt::ConfigError);
}

TEST_CASE("schema: edit distance and suggestions") {
  CHECK(edit_distance("thetaO", "theta0") == 1);
  CHECK(edit_distance("", "abc") == 3);
  CHECK(edit_distance("kitten", "sitting") == 3);
  CHECK(closest_key("thetaO", {"theta0", "p_bar"}) == "theta0");
  CHECK_FALSE(closest_key("completely_off", {"theta0", "p_bar"}).has_value());
}

// ---------------------------------------------------------------- config

TEST_CASE("config: a minimal epistemic config loads with defaults") {
  const json doc = {{"name", "mini"}, {"module", "epistemic"}};
  const auto cfg = parse_config(doc);
  CHECK(cfg.params["theta0"] == 5.0);
  CHECK(cfg.params["p_bar"] == 20.0);
  CHECK(cfg.output.format == "csv");
  CHECK(cfg.output.path == "mini");
  CHECK(cfg.seed == 0);
}

TEST_CASE("config: negative theta0 names the field") {
  const auto errors = errors_of({{"name", "x"}, {"module", "epistemic"}, {"params", {{"theta0", -1.0}}}});
  REQUIRE_FALSE(errors.empty());
  CHECK(any_contains(errors, "theta0"));
}

TEST_CASE("config: unknown keys get a closest-key suggestion") {
  const auto errors = errors_of({{"name", "x"}, {"module", "epistemic"}, {"params", {{"thetaO", 1.0}}}});
  REQUIRE(errors.size() == 1);
  CHECK(any_contains(errors, "'thetaO'"));
  CHECK(any_contains(errors, "did you mean 'theta0'"));
  CHECK(any_contains(errors_of({{"name", "x"}, {"module", "epistemic"}, {"sed", 1}}), "did you mean 'seed'"));
}

TEST_CASE("config: all errors are reported together") {
  const auto errors = errors_of({{"name", "x"},
                                 {"module", "epistemic"},
                                 {"output", {{"format", "xml"}}},
                                 {"params", {{"theta0", -1.0}, {"p_bar", "lots"}, {"bogus", 1}}}});
  CHECK(errors.size() == 4);
  CHECK(any_contains(errors, "output.format"));
  CHECK(any_contains(errors, "params.p_bar"));
  CHECK(any_contains(errors, "params.bogus"));
}

TEST_CASE("config: cross-field checks name the field") {
  CHECK(any_contains(errors_of({{"name", "x"}, {"module", "epistemic"}, {"params", {{"eps_resid", 6.0}}}}),
                     "eps_resid"));
  CHECK(any_contains(errors_of({{"name", "x"},
                                {"module", "evt"},
                                {"params", {{"family", "pareto"}, {"dist_params", {1.0}}}}}),
                     "dist_params"));
  CHECK(any_contains(errors_of({{"name", "x"},
                                {"module", "mdp"},
                                {"params",
                                 {{"n_states", 1},
                                  {"n_actions", 1},
                                  {"rewards", {{1.0}}},
                                  {"shocks", {{{"probability", 0.5}}}},
                                  {"transitions", {{{0}}}}}}}),
                     "shocks"));
  CHECK(any_contains(errors_of({{"name", "x"},
                                {"module", "policy"},
                                {"params", {{"budget", 1.0}, {"occupations", {{{"w", 1.0}, {"l_bar", 1.0}, {"eta", 1.0}, {"lambda", 1.0}}}}}}}),
                     "did you mean 'lambda_align'"));
}

TEST_CASE("config: missing required parameters") {
  const auto errors = errors_of({{"name", "x"}, {"module", "gravity"}});
  CHECK(any_contains(errors, "params.needs"));
  CHECK(any_contains(errors, "params.distances"));
  CHECK(any_contains(errors, "params.potentials"));
}

TEST_CASE("config: parse errors carry line and column") {
  const auto dir = scratch("parse");
  const auto path = dir / "broken.json";
  std::ofstream(path) << "{\n  \"name\": \"x\",\n  \"module\": epistemic\n}\n";
  try {
    (void)load_config(path);
    FAIL("expected ConfigValidationError");
  } catch (const ConfigValidationError& e) {
    REQUIRE(e.errors().size() == 1);
    CHECK(e.errors()[0].find("broken.json:3:") != std::string::npos);
  }
}

TEST_CASE("config: digest is stable and sensitive") {
  const json doc = {{"name", "d"}, {"module", "growth"}, {"seed", 5}};
  const auto a = parse_config(doc);
  const auto b = parse_config(doc);
  CHECK(a.digest() == b.digest());
  CHECK(a.digest().size() == 16);
  // Writing out a default explicitly does not change the canonical form.
  json explicit_doc = doc;
  explicit_doc["params"] = {{"horizon", 200}};
  CHECK(parse_config(explicit_doc).digest() == a.digest());
  json reseeded = doc;
  reseeded["seed"] = 6;
  CHECK(parse_config(reseeded).digest() != a.digest());
  // The canonical form is itself a valid config with the same digest.
  CHECK(parse_config(a.canonical()).digest() == a.digest());
}

// ---------------------------------------------------------------- runner

TEST_CASE("runner: flywheel_default shows aligned dominance") {
  const auto cfg = load_config(fs::path(EMT_SCENARIO_DIR) / "flywheel_default.json");
  const auto out = scratch("flywheel");
  const auto report = run_scenario(cfg, out);
  CHECK(report.passed());
  const auto it = std::find_if(report.checks.begin(), report.checks.end(),
                               [](const Check& c) { return c.name == "aligned_dominance"; });
  REQUIRE(it != report.checks.end());
  CHECK(it->passed);
  const std::string csv = slurp(report.artifacts.at(0));
  CHECK(csv.find(",blind,") != std::string::npos);
  CHECK(csv.find(",aligned,") != std::string::npos);
}

TEST_CASE("runner: evt_exponential passes its KS diagnostic") {
  const auto cfg = load_config(fs::path(EMT_SCENARIO_DIR) / "evt_exponential.json");
  const auto report = run_scenario(cfg, scratch("evt"));
  CHECK(report.passed());
  const json doc = json::parse(slurp(report.artifacts.at(0)));
  CHECK(doc["pass"] == true);
  CHECK(doc["K"] == 1000);
}

TEST_CASE("runner: reruns are byte-identical and seeds matter") {
  auto cfg = load_config(fs::path(EMT_SCENARIO_DIR) / "epistemic_transition.json");
  const auto a = run_scenario(cfg, scratch("det_a"));
  const auto b = run_scenario(cfg, scratch("det_b"));
  CHECK(slurp(a.artifacts[0]) == slurp(b.artifacts[0]));
  CHECK(a.config_digest == b.config_digest);
  cfg.seed += 1;
  const auto c = run_scenario(cfg, scratch("det_c"));
  CHECK(slurp(a.artifacts[0]) != slurp(c.artifacts[0]));
}

TEST_CASE("runner: JSON artifacts parse back") {
  const auto out = scratch("json");
  for (const char* name : {"mdp_research.json", "game_lexicographic.json", "policy_three_occupations.json"}) {
    const auto report = run_scenario(load_config(fs::path(EMT_SCENARIO_DIR) / name), out);
    for (const auto& artifact : report.artifacts) {
      if (artifact.extension() == ".json") CHECK(json::accept(slurp(artifact)));
    }
    CHECK(json::accept(report.to_json().dump()));
  }
}

TEST_CASE("runner: module failures carry the scenario name") {
  const json doc = {{"name", "unstable"},
                    {"module", "feedback"},
                    {"params", {{"theta_meta", 1e6}, {"gamma0", 10.0}, {"dt", 0.5}, {"horizon", 5000}}}};
  const auto cfg = parse_config(doc);
  try {
    (void)run_scenario(cfg, scratch("fail"));
    FAIL("expected a runtime error");
  } catch (const emt::ConfigError&) {
    FAIL("module failure must not be reported as a config error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("unstable") != std::string::npos);
    CHECK(std::string(e.what()).find("diverged") != std::string::npos);
  }
}

TEST_CASE("runner: bundled scenarios include one per module") {
  std::vector<std::string> modules;
  for (const auto& path : bundled_scenarios(EMT_SCENARIO_DIR)) modules.push_back(load_config(path).module);
  for (const auto& m : module_names()) CHECK(std::find(modules.begin(), modules.end(), m) != modules.end());
}

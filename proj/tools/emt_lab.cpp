#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "emt/errors.hpp"
#include "emt/harness/config.hpp"
#include "emt/harness/runner.hpp"
#include "emt/harness/schema.hpp"

namespace {

namespace fs = std::filesystem;
using namespace emt::harness;

enum Exit : int { ok = 0, check_failed = 1, config_error = 2, runtime_error = 3 };

void print_checks(const RunReport& report) {
  for (const auto& check : report.checks) {
    std::cout << (check.passed ? "PASS " : "FAIL ") << report.scenario << ":" << check.name << "  " << check.detail
              << '\n';
  }
}

int cmd_run(const fs::path& config, const fs::path& out, std::optional<std::uint64_t> seed, int jobs) {
  auto cfg = load_config(config);
  if (seed) cfg.seed = *seed;
  omp_set_num_threads(jobs);
  const auto report = run_scenario(cfg, out);
  std::cout << report.to_json().dump(2) << '\n';
  return report.passed() ? ok : check_failed;
}

int cmd_verify(const fs::path& scenarios, const fs::path& out, int jobs) {
  const auto result = verify_bundled(scenarios, out, jobs);
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    print_checks(result.reports[i]);
    const auto& det = result.determinism[i];
    std::cout << (det.passed ? "PASS " : "FAIL ") << det.name << "  " << det.detail << '\n';
  }
  const bool passed = result.passed();
  std::cout << (passed ? "verify: all checks passed" : "verify: failures present") << '\n';
  return passed ? ok : check_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emt-lab: scenario runner for the emergent mode transition models"};
  app.set_version_flag("--version", std::string(EMT_VERSION));
  app.require_subcommand(1);

  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "Run one scenario config");
  run->add_option("config", config, "Scenario JSON file")->required();
  run->add_option("--out", out, "Output directory");
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string scenarios = EMT_SCENARIO_DIR;
  std::string verify_out = "out/verify";
  int verify_jobs = 1;
  auto* verify = app.add_subcommand("verify", "Run every bundled scenario twice and check outputs");
  verify->add_option("--scenarios", scenarios, "Scenario directory");
  verify->add_option("--out", verify_out, "Output directory");
  verify->add_option("--jobs", verify_jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);

  std::string module;
  auto* schema = app.add_subcommand("schema", "Print the parameter schema of a module");
  schema->add_option("module", module, "Module name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*run) return cmd_run(config, out, seed, jobs);
    if (*verify) return cmd_verify(scenarios, verify_out, verify_jobs);
    if (*schema) {
      std::cout << schema_json(schema_for(module)).dump(2) << '\n';
      return ok;
    }
  } catch (const ConfigValidationError& e) {
    std::cerr << "config error:\n";
    for (const auto& msg : e.errors()) std::cerr << "  " << msg << '\n';
    return config_error;
  } catch (const emt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return runtime_error;
  }
  return ok;
}

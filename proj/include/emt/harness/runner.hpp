#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "emt/harness/config.hpp"

namespace emt::harness {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunReport {
  std::string scenario;
  std::string module;
  double wall_seconds = 0.0;
  std::vector<std::filesystem::path> artifacts;
  std::vector<Check> checks;
  std::string version = EMT_VERSION;
  std::string config_digest;

  [[nodiscard]] bool passed() const;
  [[nodiscard]] json to_json() const;
};

/// Cross-field checks on a type-checked, default-filled params block.
/// Messages start with the offending field name.
[[nodiscard]] std::vector<std::string> validate_module_params(const std::string& module, const json& params);

/// Dispatches to the module, writes artifacts under out_dir and evaluates
/// the module's embedded checks. Module errors propagate with the scenario
/// name prepended.
[[nodiscard]] RunReport run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// *.json files in `dir`, sorted by name.
[[nodiscard]] std::vector<std::filesystem::path> bundled_scenarios(const std::filesystem::path& dir);

struct VerifyResult {
  std::vector<RunReport> reports;
  std::vector<Check> determinism;  // one per scenario: rerun bytes identical
  [[nodiscard]] bool passed() const;
};

/// Runs every bundled scenario twice (into out_dir/run1 and out_dir/run2)
/// and compares artifact bytes. `jobs` > 1 runs scenarios concurrently.
[[nodiscard]] VerifyResult verify_bundled(const std::filesystem::path& scenario_dir,
                                          const std::filesystem::path& out_dir, int jobs = 1);

}  // namespace emt::harness

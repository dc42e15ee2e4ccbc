#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "emt/errors.hpp"

namespace emt::harness {

using json = nlohmann::json;

struct OutputSpec {
  std::string format;  // csv | json
  std::string path;    // artifact stem, relative to the output directory
};

struct ScenarioConfig {
  std::string name;
  std::string module;
  std::string description;
  json params;  // validated, defaults filled
  std::uint64_t seed = 0;
  OutputSpec output;

  /// Canonical form: sorted keys, defaults filled.
  [[nodiscard]] json canonical() const;
  /// FNV-1a 64 of the canonical dump, as 16 hex digits.
  [[nodiscard]] std::string digest() const;
};

/// Carries every validation failure found, not just the first.
class ConfigValidationError : public ConfigError {
 public:
  explicit ConfigValidationError(std::vector<std::string> errors);
  [[nodiscard]] const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Validates a parsed document and fills defaults. `source` prefixes messages.
[[nodiscard]] ScenarioConfig parse_config(const json& doc, const std::string& source = "<config>");

/// Reads and validates a JSON file. Parse errors report line and column.
[[nodiscard]] ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace emt::harness

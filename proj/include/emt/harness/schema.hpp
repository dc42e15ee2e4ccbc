#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace emt::harness {

using json = nlohmann::json;

enum class ParamKind {
  number,
  integer,
  boolean,
  optional_boolean,  // true, false or null
  string,
  number_list,
  integer_list,
  matrix,            // list of equal-length number lists
  tensor3,           // list of matrices of non-negative integers
  object_list,       // list of objects, checked by the module builder
};

[[nodiscard]] std::string_view kind_name(ParamKind kind) noexcept;

/// Returns an error message when the (type-checked) value is out of range.
using Constraint = std::function<std::optional<std::string>(const json&)>;

struct ParamSpec {
  std::string name;
  ParamKind kind;
  json default_value;  // discarded null means the parameter is required
  std::string description;
  Constraint constraint;
  bool required = false;
};

struct ModuleSchema {
  std::string module;
  std::vector<std::string> output_formats;  // first entry is the default
  std::vector<ParamSpec> params;

  [[nodiscard]] const ParamSpec* find(std::string_view name) const;
};

[[nodiscard]] const std::vector<std::string>& module_names();

/// Throws ConfigError for an unknown module name.
[[nodiscard]] const ModuleSchema& schema_for(std::string_view module);

[[nodiscard]] json schema_json(const ModuleSchema& schema);

/// Levenshtein distance.
[[nodiscard]] std::size_t edit_distance(std::string_view a, std::string_view b);

/// Closest candidate within edit distance 2, else the first candidate the key
/// is a strict prefix of (keys of three or more characters), if any.
[[nodiscard]] std::optional<std::string> closest_key(std::string_view key, const std::vector<std::string>& candidates);

/// Type check only; returns an error message on mismatch.
[[nodiscard]] std::optional<std::string> check_kind(ParamKind kind, const json& value);

}  // namespace emt::harness

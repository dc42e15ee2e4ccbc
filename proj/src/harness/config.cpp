#include "emt/harness/config.hpp"

#include <cstdio>
#include <algorithm>
#include <fstream>
#include <sstream>

#include "emt/harness/runner.hpp"
#include "emt/harness/schema.hpp"

namespace emt::harness {

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string msg = std::to_string(errors.size()) + " configuration error(s):";
  for (const auto& e : errors) msg += "\n  " + e;
  return msg;
}

const std::vector<std::string> kTopLevelKeys = {"name", "module", "description", "seed", "output", "params"};

void line_column(const std::string& text, std::size_t byte, std::size_t& line, std::size_t& column) {
  line = 1;
  column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

void reject_unknown(const json& object, const std::vector<std::string>& allowed, const std::string& where,
                    std::vector<std::string>& errors) {
  for (const auto& [key, _] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
    std::string msg = where + key + ": unknown key '" + key + "'";
    if (auto hint = closest_key(key, allowed)) msg += " (did you mean '" + *hint + "'?)";
    errors.push_back(std::move(msg));
  }
}

}  // namespace

ConfigValidationError::ConfigValidationError(std::vector<std::string> errors)
    : ConfigError(join_errors(errors)), errors_(std::move(errors)) {}

json ScenarioConfig::canonical() const {
  return {{"name", name},
          {"module", module},
          {"description", description},
          {"seed", seed},
          {"output", {{"format", output.format}, {"path", output.path}}},
          {"params", params}};
}

std::string ScenarioConfig::digest() const {
  const std::string text = canonical().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ScenarioConfig parse_config(const json& doc, const std::string& source) {
  std::vector<std::string> errors;
  const std::string at = source + ": ";
  if (!doc.is_object()) throw ConfigValidationError({at + "top level must be a JSON object"});

  reject_unknown(doc, kTopLevelKeys, at, errors);

  ScenarioConfig cfg;
  if (!doc.contains("name") || !doc["name"].is_string() || doc["name"].get<std::string>().empty()) {
    errors.push_back(at + "name: required non-empty string");
  } else {
    cfg.name = doc["name"].get<std::string>();
  }
  if (doc.contains("description")) {
    if (doc["description"].is_string()) {
      cfg.description = doc["description"].get<std::string>();
    } else {
      errors.push_back(at + "description: expected string");
    }
  }
  if (doc.contains("seed")) {
    if (doc["seed"].is_number_unsigned()) {
      cfg.seed = doc["seed"].get<std::uint64_t>();
    } else if (doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0) {
      cfg.seed = static_cast<std::uint64_t>(doc["seed"].get<std::int64_t>());
    } else {
      errors.push_back(at + "seed: expected unsigned 64-bit integer");
    }
  }

  const ModuleSchema* schema = nullptr;
  if (!doc.contains("module") || !doc["module"].is_string()) {
    errors.push_back(at + "module: required string, one of epistemic, growth, evt, gravity, mdp, feedback, game, policy");
  } else {
    cfg.module = doc["module"].get<std::string>();
    try {
      schema = &schema_for(cfg.module);
    } catch (const ConfigError& e) {
      errors.push_back(at + "module: " + e.what());
    }
  }

  if (schema != nullptr) {
    cfg.output.format = schema->output_formats.front();
    cfg.output.path = cfg.name;
  }
  if (doc.contains("output")) {
    const json& out = doc["output"];
    if (!out.is_object()) {
      errors.push_back(at + "output: expected object {format, path}");
    } else {
      reject_unknown(out, {"format", "path"}, at + "output.", errors);
      if (out.contains("format")) {
        if (!out["format"].is_string()) {
          errors.push_back(at + "output.format: expected string");
        } else {
          cfg.output.format = out["format"].get<std::string>();
          if (schema && std::find(schema->output_formats.begin(), schema->output_formats.end(),
                                  cfg.output.format) == schema->output_formats.end()) {
            std::string msg = at + "output.format: module '" + cfg.module + "' supports";
            for (const auto& f : schema->output_formats) msg += " '" + f + "'";
            errors.push_back(msg);
          }
        }
      }
      if (out.contains("path")) {
        if (!out["path"].is_string() || out["path"].get<std::string>().empty()) {
          errors.push_back(at + "output.path: expected non-empty string");
        } else {
          cfg.output.path = out["path"].get<std::string>();
        }
      }
    }
  }

  json params = json::object();
  if (doc.contains("params")) {
    if (doc["params"].is_object()) {
      params = doc["params"];
    } else {
      errors.push_back(at + "params: expected object");
    }
  }

  if (schema != nullptr) {
    std::vector<std::string> names;
    for (const auto& p : schema->params) names.push_back(p.name);
    reject_unknown(params, names, at + "params.", errors);

    json filled = json::object();
    for (const auto& spec : schema->params) {
      const std::string where = at + "params." + spec.name;
      if (!params.contains(spec.name)) {
        if (spec.required) {
          errors.push_back(where + ": required " + std::string(kind_name(spec.kind)));
        } else {
          filled[spec.name] = spec.default_value;
        }
        continue;
      }
      const json& value = params[spec.name];
      if (auto kind_error = check_kind(spec.kind, value)) {
        errors.push_back(where + ": " + *kind_error);
        continue;
      }
      if (spec.constraint) {
        if (auto range_error = spec.constraint(value)) {
          errors.push_back(where + ": " + *range_error);
          continue;
        }
      }
      filled[spec.name] = value;
    }

    // Cross-field checks need a complete, well-typed block.
    if (errors.empty()) {
      for (auto& message : validate_module_params(cfg.module, filled)) errors.push_back(at + "params." + message);
    }
    cfg.params = std::move(filled);
  }

  if (!errors.empty()) throw ConfigValidationError(std::move(errors));
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigValidationError({path.string() + ": cannot open file"});
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 0;
    std::size_t column = 0;
    line_column(text, e.byte == 0 ? 0 : e.byte - 1, line, column);
    throw ConfigValidationError({path.string() + ":" + std::to_string(line) + ":" + std::to_string(column) +
                                 ": parse error: " + e.what()});
  }
  return parse_config(doc, path.string());
}

}  // namespace emt::harness

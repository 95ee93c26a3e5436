// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

// Validates documents against the subset of JSON Schema used in docs/schemas:
// type, enum, required, properties, additionalProperties, items, pattern,
// minimum.

#pragma once

#include <regex>
#include <string>
#include <vector>

#include "json.hpp"

namespace caseforge::testing {

inline bool json_has_type(const nlohmann::json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "null") return v.is_null();
  return false;
}

inline void schema_errors(const nlohmann::json& schema, const nlohmann::json& v, const std::string& path,
                          std::vector<std::string>& out) {
  if (schema.contains("type")) {
    std::vector<std::string> types;
    if (schema["type"].is_array()) {
      for (const auto& t : schema["type"]) types.push_back(t.get<std::string>());
    } else {
      types.push_back(schema["type"].get<std::string>());
    }
    bool any = false;
    for (const auto& t : types) any = any || json_has_type(v, t);
    if (!any) {
      out.push_back(path + ": wrong type");
      return;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == v;
    if (!found) out.push_back(path + ": " + v.dump() + " not in enum");
  }
  if (v.is_string() && schema.contains("pattern")) {
    if (!std::regex_search(v.get<std::string>(), std::regex(schema["pattern"].get<std::string>()))) {
      out.push_back(path + ": '" + v.get<std::string>() + "' does not match pattern");
    }
  }
  if (v.is_number() && schema.contains("minimum") && v.get<double>() < schema["minimum"].get<double>()) {
    out.push_back(path + ": below minimum");
  }
  if (v.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!v.contains(key.get<std::string>())) out.push_back(path + ": missing '" + key.get<std::string>() + "'");
      }
    }
    for (const auto& [key, child] : v.items()) {
      const std::string child_path = path + "/" + key;
      if (schema.contains("properties") && schema["properties"].contains(key)) {
        schema_errors(schema["properties"][key], child, child_path, out);
      } else if (schema.contains("additionalProperties")) {
        const auto& extra = schema["additionalProperties"];
        if (extra.is_boolean()) {
          if (!extra.get<bool>()) out.push_back(child_path + ": unexpected property");
        } else {
          schema_errors(extra, child, child_path, out);
        }
      }
    }
  }
  if (v.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      schema_errors(schema["items"], v[i], path + "/" + std::to_string(i), out);
    }
  }
}

inline std::vector<std::string> schema_errors(const nlohmann::json& schema, const nlohmann::json& v) {
  std::vector<std::string> out;
  schema_errors(schema, v, "", out);
  return out;
}

}  // namespace caseforge::testing

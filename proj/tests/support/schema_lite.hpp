#pragma once

// Minimal JSON Schema subset checker used to validate CLI output documents
// against the schemas shipped in schemas/.  Supported keywords: "type",
// "required", "properties", "items" (single schema), "additionalProperties"
// (boolean false), "enum".  That subset is all the shipped schemas use.

#include <string>

#include <json.hpp>

namespace test_support {

using nlohmann::json;

inline bool type_matches(const std::string& type, const json& value) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
  if (type == "number") return value.is_number();
  return false;
}

inline bool validate_schema(const json& schema, const json& value,
                            const std::string& path, std::string& error) {
  if (schema.contains("type")) {
    const auto& t = schema.at("type");
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(t.get<std::string>(), value);
    } else if (t.is_array()) {
      for (const auto& alt : t) ok = ok || type_matches(alt.get<std::string>(), value);
    }
    if (!ok) {
      error = path + ": expected type " + t.dump() + ", got " + value.type_name();
      return false;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& alt : schema.at("enum")) ok = ok || (alt == value);
    if (!ok) {
      error = path + ": value " + value.dump() + " not in enum";
      return false;
    }
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema.at("required")) {
        if (!value.contains(key.get<std::string>())) {
          error = path + ": missing required key '" + key.get<std::string>() + "'";
          return false;
        }
      }
    }
    const json* props = schema.contains("properties") ? &schema.at("properties") : nullptr;
    if (props) {
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (props->contains(it.key())) {
          if (!validate_schema(props->at(it.key()), it.value(), path + "/" + it.key(), error))
            return false;
        } else if (schema.contains("additionalProperties") &&
                   schema.at("additionalProperties").is_boolean() &&
                   !schema.at("additionalProperties").get<bool>()) {
          error = path + ": unexpected key '" + it.key() + "'";
          return false;
        }
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    int idx = 0;
    for (const auto& item : value) {
      if (!validate_schema(schema.at("items"), item, path + "[" + std::to_string(idx) + "]", error))
        return false;
      ++idx;
    }
  }
  return true;
}

inline bool validate_schema(const json& schema, const json& value, std::string& error) {
  return validate_schema(schema, value, "$", error);
}

}  // namespace test_support

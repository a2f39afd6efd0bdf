#pragma once

#include <nlohmann/json.hpp>

namespace ridge::testing {

// Keys and value types of a JSON document, with arrays reduced to "array".
// Golden files store this shape so schema drift shows up as a diff.
inline nlohmann::json schema_shape(const nlohmann::json& j) {
  if (j.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : j.items()) out[k] = schema_shape(v);
    return out;
  }
  if (j.is_array()) return "array";
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  return "null";
}

}  // namespace ridge::testing

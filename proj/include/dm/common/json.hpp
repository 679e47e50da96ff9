// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>
#include <string>
#include <string_view>

#include "dm/common/error.hpp"
#include "dm/common/geometry.hpp"

namespace dm {

// Insertion-ordered JSON keeps serialized field order stable, which the
// canonical state/event encodings and their hashes depend on.
using Json = nlohmann::ordered_json;

/// Reads a required member, converting type errors to SchemaError with a JSON pointer.
template <typename T>
T require(const Json& j, std::string_view key, std::string_view where) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) {
    throw Error(ErrorCode::SchemaError, std::string(where) + "/" + std::string(key) + ": missing");
  }
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::SchemaError, std::string(where) + "/" + std::string(key) + ": wrong type");
  }
}

template <typename T>
T optional_or(const Json& j, std::string_view key, T fallback, std::string_view where) {
  if (!j.contains(std::string(key))) return fallback;
  return require<T>(j, key, where);
}

inline Json to_json(Vec2 v) { return Json::array({v.x, v.y}); }
Vec2 vec2_from_json(const Json& j, std::string_view where);

Json parse_json(std::string_view text, ErrorCode on_error = ErrorCode::SchemaError);
Json read_json_file(const std::string& path);

}  // namespace dm

// SPDX-License-Identifier: Apache-2.0
#include "dm/common/json.hpp"

#include <fstream>
#include <sstream>

namespace dm {

Vec2 vec2_from_json(const Json& j, std::string_view where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorCode::SchemaError, std::string(where) + ": expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json parse_json(std::string_view text, ErrorCode on_error) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(on_error, e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

}  // namespace dm

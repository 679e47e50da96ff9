// SPDX-License-Identifier: Apache-2.0
#include "dm/engine/narration.hpp"

#include "dm/common/error.hpp"

namespace dm::engine {

std::vector<std::string> Narration::render(const std::string& key, const std::map<std::string, std::string>& vars) const {
  const auto it = templates.find(key);
  if (it == templates.end()) return {};
  std::vector<std::string> out;
  for (std::string line : it->second) {
    for (const auto& [name, value] : vars) {
      const std::string token = "{" + name + "}";
      for (auto pos = line.find(token); pos != std::string::npos; pos = line.find(token, pos + value.size())) {
        line.replace(pos, token.size(), value);
      }
    }
    out.push_back(std::move(line));
  }
  return out;
}

Narration narration_from_json(const Json& j) {
  if (optional_or<std::string>(j, "schema", "", "") != "dm.narration/1") {
    throw Error(ErrorCode::SchemaError, "narration: unsupported schema");
  }
  Narration n;
  n.version = require<std::string>(j, "version", "");
  for (const auto& [key, lines] : j.at("templates").items()) n.templates[key] = lines.get<std::vector<std::string>>();
  for (const auto& r : j.at("riddles")) {
    n.riddles.push_back({require<int>(r, "id", "/riddles"), require<std::string>(r, "element", "/riddles"),
                         require<std::string>(r, "text", "/riddles")});
  }
  if (n.riddles.size() != 3) throw Error(ErrorCode::SchemaError, "narration: exactly 3 riddles expected");
  return n;
}

const Narration& default_narration() {
  static const Narration n = narration_from_json(read_json_file(std::string(DM_ASSET_DIR) + "/narration.json"));
  return n;
}

}  // namespace dm::engine

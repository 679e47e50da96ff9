// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "dm/common/json.hpp"

namespace dm::engine {

struct Riddle {
  int id = 0;
  std::string element;  // part of the key the riddle describes
  std::string text;
};

/// Keyed text asset: narration templates (key -> lines with `{name}`
/// placeholders) plus the riddle bank.
struct Narration {
  std::string version;
  std::map<std::string, std::vector<std::string>> templates;
  std::vector<Riddle> riddles;
  /// Lines for `key` with placeholders substituted; empty if the key is absent.
  std::vector<std::string> render(const std::string& key, const std::map<std::string, std::string>& vars = {}) const;
};

Narration narration_from_json(const Json& j);
const Narration& default_narration();

}  // namespace dm::engine

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dm/session/session.hpp"

namespace dm::cli {

inline constexpr std::string_view kScriptSchema = "dm.script/1";

/// One scripted player action.
///   MOVE tokens | PASS | DICE values | BEHAVIOR behavior | CRAFT asset |
///   SKIP_CRAFT | KEY asset | STOP
/// Assets name a baseline outline (AXE, SWORD, BOW, KEY), optionally
/// perturbed by `noise` (vertex fraction) from `noise_seed`.
struct ScriptAction {
  std::string type;
  std::optional<int> player;
  std::vector<std::string> tokens;
  std::vector<int> values;
  std::string behavior;
  std::string asset;
  double noise = 0.0;
  std::uint64_t noise_seed = 0;
};
Json to_json(const ScriptAction& a);
ScriptAction action_from_json(const Json& j, std::string_view where);

struct Script {
  std::string name;
  std::optional<std::uint64_t> seed;
  std::vector<ScriptAction> actions;
};
Json to_json(const Script& s);
Script script_from_json(const Json& j);
Script load_script(const std::string& path);

vision::Contour asset_contour(const ScriptAction& a);

/// Renders the action's physical input and pushes it through the scan and
/// command surface of `s`. Throws ScriptMismatch when the action does not
/// fit the current phase or the scan disagrees with the script.
void perform(session::Session& s, const ScriptAction& a, std::size_t index);

struct PlayOptions {
  std::string log_path;
  std::optional<std::uint64_t> seed;  // overrides script and config
  std::optional<double> speed;        // overrides cfg.sim.speed
  bool pacing = true;
};

struct PlayResult {
  engine::Outcome outcome = engine::Outcome::Ongoing;
  int exit_code = 0;
  std::optional<std::string> error;  // wire error code
  std::string message;
  bool stopped = false;
  int rounds = 0;
  std::size_t actions_used = 0;
  std::size_t log_records = 0;
  std::string state_hash;
  std::string world_hash;
  std::string log_sha256;  // digest of the JSON-lines log body
};
Json to_json(const PlayResult& r);

enum ExitCode : int { kExitWin = 0, kExitLoss = 10, kExitUsage = 64, kExitData = 65, kExitInternal = 70 };
int exit_code_for(ErrorCode c);

PlayResult play(board::GameConfig cfg, const Script& script, const PlayOptions& opts = {});

/// SHA-256 of the log records as written (one canonical JSON line each).
std::string log_digest(const std::vector<session::ChannelMessage>& log);

}  // namespace dm::cli

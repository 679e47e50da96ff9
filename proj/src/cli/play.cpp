// SPDX-License-Identifier: Apache-2.0
#include "dm/cli/play.hpp"

#include <algorithm>

#include "dm/common/hash.hpp"
#include "dm/vision/dice.hpp"
#include "dm/vision/perturb.hpp"
#include "dm/vision/raster.hpp"
#include "dm/vision/render.hpp"

namespace dm::cli {

namespace {

const std::vector<std::string>& action_types() {
  static const std::vector<std::string> t{"MOVE", "PASS", "DICE", "BEHAVIOR", "CRAFT", "SKIP_CRAFT", "KEY", "STOP"};
  return t;
}

std::string expected_phase(const std::string& type) {
  if (type == "MOVE" || type == "PASS") return "AWAIT_MOVE";
  if (type == "DICE") return "AWAIT_DICE";
  if (type == "BEHAVIOR") return "AWAIT_BEHAVIOR";
  if (type == "CRAFT" || type == "SKIP_CRAFT") return "AWAIT_CRAFT";
  if (type == "KEY") return "AWAIT_KEY";
  return "";
}

std::string raster_b64(const vision::Raster& r) { return base64_encode(vision::encode_pgm(r)); }

}  // namespace

Json to_json(const ScriptAction& a) {
  Json j{{"type", a.type}};
  if (a.player) j["player"] = *a.player;
  if (a.type == "MOVE") j["tokens"] = a.tokens;
  if (a.type == "DICE") j["values"] = a.values;
  if (a.type == "BEHAVIOR") j["behavior"] = a.behavior;
  if (a.type == "CRAFT" || a.type == "KEY") {
    j["asset"] = a.asset;
    if (a.noise > 0) {
      j["noise"] = a.noise;
      j["noise_seed"] = a.noise_seed;
    }
  }
  return j;
}

ScriptAction action_from_json(const Json& j, std::string_view where) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, std::string(where) + ": expected object");
  ScriptAction a;
  a.type = require<std::string>(j, "type", where);
  if (std::find(action_types().begin(), action_types().end(), a.type) == action_types().end()) {
    throw Error(ErrorCode::SchemaError, std::string(where) + "/type: unknown action '" + a.type + "'");
  }
  if (j.contains("player")) a.player = require<int>(j, "player", where);
  if (a.type == "MOVE") a.tokens = require<std::vector<std::string>>(j, "tokens", where);
  if (a.type == "DICE") a.values = require<std::vector<int>>(j, "values", where);
  if (a.type == "BEHAVIOR") a.behavior = require<std::string>(j, "behavior", where);
  if (a.type == "CRAFT" || a.type == "KEY") {
    a.asset = require<std::string>(j, "asset", where);
    a.noise = optional_or<double>(j, "noise", 0.0, where);
    a.noise_seed = optional_or<std::uint64_t>(j, "noise_seed", 0, where);
  }
  return a;
}

Json to_json(const Script& s) {
  Json acts = Json::array();
  for (const auto& a : s.actions) acts.push_back(to_json(a));
  Json j{{"schema", kScriptSchema}, {"name", s.name}};
  j["seed"] = s.seed ? Json(*s.seed) : Json(nullptr);
  j["actions"] = acts;
  return j;
}

Script script_from_json(const Json& j) {
  if (!j.is_object() || j.value("schema", "") != kScriptSchema) {
    throw Error(ErrorCode::SchemaError, "/schema: expected " + std::string(kScriptSchema));
  }
  Script s;
  s.name = optional_or<std::string>(j, "name", "", "");
  if (j.contains("seed") && !j["seed"].is_null()) s.seed = require<std::uint64_t>(j, "seed", "");
  const auto& acts = j.contains("actions") ? j["actions"] : Json();
  if (!acts.is_array()) throw Error(ErrorCode::SchemaError, "/actions: expected array");
  for (std::size_t i = 0; i < acts.size(); ++i) s.actions.push_back(action_from_json(acts[i], "/actions/" + std::to_string(i)));
  return s;
}

Script load_script(const std::string& path) { return script_from_json(read_json_file(path)); }

vision::Contour asset_contour(const ScriptAction& a) {
  const auto& base = vision::default_baselines();
  vision::Contour c;
  if (a.asset == "KEY") {
    c = base.key;
  } else if (const auto k = weapon_kind_from_string(a.asset)) {
    c = base.weapon(*k);
  } else {
    throw Error(ErrorCode::SchemaError, "unknown asset '" + a.asset + "'");
  }
  if (a.noise > 0) {
    Rng rng(a.noise_seed);
    c = vision::perturb_vertices(c, a.noise, rng);
  }
  return c;
}

void perform(session::Session& s, const ScriptAction& a, std::size_t index) {
  const auto st = s.state();
  const std::string at = "action " + std::to_string(index) + " (" + a.type + ")";
  const std::string want = expected_phase(a.type);
  if (std::string(engine::to_string(st.phase)) != want) {
    throw Error(ErrorCode::ScriptMismatch,
                at + ": game is in phase " + std::string(engine::to_string(st.phase)) + ", expected " + want);
  }
  const int player = a.player.value_or(st.active);
  if (player != st.active) {
    throw Error(ErrorCode::ScriptMismatch, at + ": player " + std::to_string(player) + " is not active");
  }
  const double mmpp = s.config().mm_per_pixel;
  if (a.type == "MOVE" || a.type == "PASS") {
    std::vector<vision::TokenId> ids;
    for (const auto& t : a.tokens) {
      const auto id = vision::token_from_string(t);
      if (!id) throw Error(ErrorCode::SchemaError, at + ": unknown token " + t);
      ids.push_back(*id);
    }
    Json tokens = Json::array();
    if (!ids.empty()) {
      const auto raster = vision::render_tokens(vision::layout_tokens(ids), mmpp);
      const Json resp = s.scan(Json{{"kind", "TOKENS"}, {"player", player}, {"raster", raster_b64(raster)}});
      tokens = resp.at("tokens");
      if (tokens != Json(a.tokens) && !(a.tokens.empty() && tokens.empty())) {
        // Aliases (UP vs MOVE_UP) compare by id.
        std::vector<std::string> canon;
        for (const auto id : ids) canon.emplace_back(vision::to_string(id));
        if (tokens != Json(canon)) throw Error(ErrorCode::ScriptMismatch, at + ": plate scan read " + tokens.dump());
      }
    }
    s.command(Json{{"type", "CONFIRM_MOVE"}, {"player", player}, {"tokens", tokens}});
  } else if (a.type == "DICE") {
    std::vector<int> bottoms;
    for (const int v : a.values) {
      if (v < 1 || v > 6) throw Error(ErrorCode::SchemaError, at + ": die value outside 1..6");
      bottoms.push_back(7 - v);
    }
    vision::DiceOptions o;
    o.mm_per_pixel = mmpp;
    const auto raster = vision::render_dice(bottoms, o);
    const Json resp = s.scan(Json{{"kind", "DICE"}, {"player", player}, {"raster", raster_b64(raster)}});
    if (resp.at("values") != Json(a.values)) {
      throw Error(ErrorCode::ScriptMismatch, at + ": dice scan read " + resp.at("values").dump());
    }
    s.command(Json{{"type", "DICE_SUBMIT"}, {"player", player}, {"dice", resp.at("values")}});
  } else if (a.type == "BEHAVIOR") {
    s.command(Json{{"type", "BEHAVIOR_CHOICE"}, {"player", player}, {"behavior", a.behavior}});
  } else if (a.type == "CRAFT" || a.type == "KEY") {
    const auto raster = vision::render_contour(asset_contour(a), mmpp);
    const std::string kind = a.type == "CRAFT" ? "WEAPON" : "KEY";
    s.scan(Json{{"kind", kind}, {"player", player}, {"raster", raster_b64(raster)}});
    s.command(Json{{"type", a.type == "CRAFT" ? "CRAFT_SUBMIT" : "ATTEMPT_KEY"}, {"player", player}});
  } else if (a.type == "SKIP_CRAFT") {
    s.command(Json{{"type", "CRAFT_SKIP"}, {"player", player}});
  }
}

Json to_json(const PlayResult& r) {
  return Json{{"outcome", engine::to_string(r.outcome)},
              {"exit_code", r.exit_code},
              {"error", r.error ? Json(*r.error) : Json(nullptr)},
              {"message", r.message},
              {"stopped", r.stopped},
              {"rounds", r.rounds},
              {"actions_used", r.actions_used},
              {"log_records", r.log_records},
              {"state_hash", r.state_hash},
              {"world_hash", r.world_hash},
              {"log_sha256", r.log_sha256}};
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::Internal: return kExitInternal;
    default: return kExitData;
  }
}

std::string log_digest(const std::vector<session::ChannelMessage>& log) {
  std::string body;
  for (const auto& m : log) {
    body += session::to_json(m).dump();
    body += '\n';
  }
  return sha256_hex(body);
}

PlayResult play(board::GameConfig cfg, const Script& script, const PlayOptions& opts) {
  if (opts.seed) {
    cfg.seed = *opts.seed;
  } else if (script.seed) {
    cfg.seed = *script.seed;
  }
  if (opts.speed) cfg.sim.speed = *opts.speed;
  cfg.validate();
  session::SessionOptions so;
  so.log_path = opts.log_path;
  so.clock = [] { return 0.0; };
  so.pacing = opts.pacing;
  session::Session s(script.name.empty() ? "play" : script.name, std::make_shared<const board::GameConfig>(cfg), so);

  PlayResult r;
  try {
    std::size_t i = 0;
    for (; i < script.actions.size(); ++i) {
      if (s.state().phase == engine::Phase::Ended) break;
      if (script.actions[i].type == "STOP") {
        r.stopped = true;
        ++i;
        break;
      }
      perform(s, script.actions[i], i);
    }
    r.actions_used = i;
    if (!r.stopped && s.state().phase != engine::Phase::Ended) {
      throw Error(ErrorCode::ScriptExhausted, "script ended after " + std::to_string(i) + " actions before the game did");
    }
  } catch (const Error& e) {
    r.error = std::string(to_string(e.code()));
    r.message = e.what();
    r.exit_code = exit_code_for(e.code());
  }
  const auto st = s.state();
  r.outcome = st.outcome;
  r.rounds = st.round;
  if (!r.error) r.exit_code = st.outcome == engine::Outcome::Loss ? kExitLoss : kExitWin;
  const auto log = s.log();
  r.log_records = log.size();
  r.log_sha256 = log_digest(log);
  r.state_hash = engine::state_hash(st);
  r.world_hash = s.world_hash();
  return r;
}

}  // namespace dm::cli

// SPDX-License-Identifier: Apache-2.0
#include "dm/session/session.hpp"

#include <chrono>
#include <deque>
#include <sstream>

#include "dm/common/hash.hpp"
#include "dm/motion/job.hpp"
#include "dm/vision/dice.hpp"
#include "dm/vision/markers.hpp"
#include "dm/vision/perturb.hpp"
#include "dm/vision/raster.hpp"
#include "dm/vision/render.hpp"
#include "dm/vision/tokens.hpp"

namespace dm::session {

using engine::EventKind;
using engine::Phase;

namespace {

constexpr std::array<std::pair<MessageType, std::string_view>, 5> kTypeNames{{
    {MessageType::GameEvent, "GAME_EVENT"},
    {MessageType::MotionProgress, "MOTION_PROGRESS"},
    {MessageType::StateSnapshot, "STATE_SNAPSHOT"},
    {MessageType::Command, "COMMAND"},
    {MessageType::Error, "ERROR"},
}};

std::vector<board::GridPos> path_from_json(const Json& j) {
  std::vector<board::GridPos> out;
  for (const auto& c : j) out.push_back(board::grid_pos_from_json(c, "/payload/path"));
  return out;
}

motion::JobResult failed_job(const std::string& id, const Error& e) {
  motion::JobResult r;
  r.job_id = id;
  r.status = motion::JobStatus::Failed;
  r.error = std::string(to_string(e.code()));
  r.message = e.what();
  return r;
}

Json header_json(const std::string& id, const board::GameConfig& cfg) {
  return Json{{"type", "HEADER"}, {"schema", kLogSchema}, {"session", id}, {"config", board::to_json(cfg)}};
}

// Raster from a scan request: base64 PGM, or a millimetre polyline drawn on
// the UI canvas (outline kinds only).
vision::Raster scan_raster(const Json& req, const std::string& kind, double mm_per_pixel) {
  if (req.contains("raster")) {
    if (!req["raster"].is_string()) throw Error(ErrorCode::SchemaError, "/raster: expected base64 string");
    const auto bytes = base64_decode(req["raster"].get<std::string>());
    try {
      return vision::read_pgm(bytes);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseFailed, std::string("raster: ") + e.what());
    }
  }
  if (req.contains("polyline")) {
    if (kind != "WEAPON" && kind != "KEY") {
      throw Error(ErrorCode::SchemaError, "/polyline: only WEAPON and KEY scans accept a polyline");
    }
    vision::Contour c;
    const auto& pl = req["polyline"];
    if (!pl.is_array()) throw Error(ErrorCode::SchemaError, "/polyline: expected array");
    for (std::size_t i = 0; i < pl.size(); ++i) c.points.push_back(vec2_from_json(pl[i], "/polyline/" + std::to_string(i)));
    try {
      vision::validate_contour(c);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseFailed, std::string("polyline: ") + e.what());
    }
    return vision::render_contour(c, mm_per_pixel);
  }
  throw Error(ErrorCode::SchemaError, "/raster: missing (or /polyline)");
}

std::string phase_name_for(const std::string& kind) {
  if (kind == "DICE") return "AWAIT_DICE";
  if (kind == "TOKENS") return "AWAIT_MOVE";
  if (kind == "WEAPON") return "AWAIT_CRAFT";
  return "AWAIT_KEY";
}

}  // namespace

std::string_view to_string(MessageType t) {
  for (const auto& [k, n] : kTypeNames) {
    if (k == t) return n;
  }
  return "?";
}

std::optional<MessageType> message_type_from_string(std::string_view s) {
  for (const auto& [k, n] : kTypeNames) {
    if (n == s) return k;
  }
  return std::nullopt;
}

Json to_json(const ChannelMessage& m) { return Json{{"type", to_string(m.type)}, {"seq", m.seq}, {"payload", m.payload}}; }

ChannelMessage message_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "message: expected object");
  const auto type = message_type_from_string(require<std::string>(j, "type", ""));
  if (!type) throw Error(ErrorCode::SchemaError, "/type: unknown message type");
  if (!j.contains("payload")) throw Error(ErrorCode::SchemaError, "/payload: missing");
  return {*type, require<std::uint64_t>(j, "seq", ""), j.at("payload")};
}

Clock steady_clock() {
  return [] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
  };
}

sim::Simulator make_twin(const engine::GameState& s) {
  sim::Simulator sim(s.cfg().machine, s.cfg().sim);
  std::vector<board::Figure> figs;
  for (const auto& p : s.players) figs.push_back(p.figure);
  figs.push_back(s.dragon.figure);
  sim.place_figures(figs, s.cfg());
  return sim;
}

std::vector<motion::JobResult> drive_motion(const engine::SessionEvent& e, sim::Simulator& sim,
                                            const board::GameConfig& cfg, int& next_job,
                                            const motion::ProgressFn& progress,
                                            const std::function<void(const motion::JobResult&)>& on_result) {
  std::vector<motion::JobResult> out;
  const auto run = [&](const std::function<motion::MotionJob(const std::string&)>& compile) {
    const std::string id = "job-" + std::to_string(next_job++);
    motion::JobResult r;
    try {
      r = motion::run_motion_job(compile(id), sim, cfg, progress);
    } catch (const Error& err) {
      r = failed_job(id, err);
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  };
  const Json& p = e.payload;
  const auto figure_of = [&](const Json& pos) {
    board::Figure f;
    f.id = p.at("figure").get<std::string>();
    f.marker_id = p.at("marker_id").get<int>();
    f.pos = board::grid_pos_from_json(pos, "/payload");
    f.damage = sim.damage(f.id);
    return f;
  };
  switch (e.kind) {
    case EventKind::MotionRequested:
    case EventKind::DragonMoved: {
      const auto f = figure_of(p.at("from"));
      const auto path = path_from_json(p.at("path"));
      run([&](const std::string& id) { return motion::compile_move_job(f, path, cfg, id); });
      break;
    }
    case EventKind::DamageCutOrdered: {
      for (const auto& t : p.at("targets")) {
        const auto flag = board::damage_flag_from_string(t.get<std::string>());
        if (!flag) continue;
        const auto f = figure_of(p.at("pos"));
        run([&](const std::string& id) { return motion::compile_cut_job(f, *flag, cfg, id); });
      }
      break;
    }
    default: break;
  }
  return out;
}

Session::Session(std::string id, std::shared_ptr<const board::GameConfig> cfg, SessionOptions opts)
    : id_(std::move(id)),
      cfg_(std::move(cfg)),
      opts_(std::move(opts)),
      engine_(cfg_),
      sim_(make_twin(engine_.state())) {
  if (!opts_.clock) opts_.clock = steady_clock();
  sim_.set_pacing(opts_.pacing);
  if (!opts_.log_path.empty()) {
    out_ = std::make_unique<std::ofstream>(opts_.log_path, std::ios::binary | std::ios::trunc);
    if (!*out_) throw Error(ErrorCode::IoError, "cannot open log " + opts_.log_path);
    *out_ << header_json(id_, *cfg_).dump() << '\n';
    out_->flush();
  }
  std::lock_guard lock(mu_);
  process(engine_.log());
}

Session::~Session() = default;

void Session::record(MessageType type, Json payload) {
  ChannelMessage m{type, log_.size() + 1, std::move(payload)};
  if (out_) {
    *out_ << to_json(m).dump() << '\n';
    out_->flush();
    if (!*out_) throw Error(ErrorCode::IoError, "log write failed");
  }
  log_.push_back(m);
  for (const auto& [_, fn] : listeners_) fn(m);
}

void Session::record_events(const std::vector<engine::SessionEvent>& events) {
  for (const auto& e : events) {
    record(MessageType::GameEvent, engine::to_json(e));
    if (e.kind == EventKind::PhaseChanged && e.payload.value("phase", "") == "AWAIT_CRAFT") {
      craft_started_ = opts_.clock();
      crafts_.erase(e.payload.value("active", -1));
    }
    if (e.kind == EventKind::PhaseChanged && e.payload.value("phase", "") == "AWAIT_KEY") {
      keys_.erase(e.payload.value("active", -1));
    }
  }
}

void Session::process(std::vector<engine::SessionEvent> events) {
  record_events(events);
  for (const auto& e : events) {
    const auto progress = [&](const motion::MotionProgress& mp) {
      Json j = motion::to_json(mp);
      j["event"] = "STAGE";
      record(MessageType::MotionProgress, std::move(j));
    };
    const auto on_result = [&](const motion::JobResult& r) {
      Json j{{"event", "JOB_RESULT"}, {"result", motion::to_json(r)}, {"world_hash", sim_.hash()}};
      record(MessageType::MotionProgress, std::move(j));
    };
    const auto results = drive_motion(e, sim_, *cfg_, next_job_, progress, on_result);
    if (e.kind == EventKind::MotionRequested && !results.empty()) {
      const int player = e.payload.at("player").get<int>();
      const auto& r = results.front();
      if (r.status == motion::JobStatus::Completed) {
        const auto path = path_from_json(e.payload.at("path"));
        process(engine_.apply_move(player, path));
      } else {
        process(engine_.cancel_move(player, r.error.value_or("MOTION_FAILED")));
      }
    } else if (e.kind == EventKind::DragonMoved && !results.empty() &&
               results.front().status != motion::JobStatus::Completed) {
      record(MessageType::Error,
             Json{{"code", results.front().error.value_or("MOTION_FAILED")},
                  {"message", "dragon figure not moved: " + results.front().message}});
    }
  }
}

void Session::dispatch(const Json& cmd) {
  if (!cmd.is_object()) throw Error(ErrorCode::SchemaError, "command: expected object");
  const auto type = require<std::string>(cmd, "type", "");
  const int player = require<int>(cmd, "player", "");
  if (player < 0 || player >= engine::kPlayers) throw Error(ErrorCode::SchemaError, "/player: out of range");
  const auto& st = engine_.state();
  if (st.phase != Phase::Ended && player != st.active) {
    throw Error(ErrorCode::NotYourTurn, "player " + std::to_string(player) + " is not active");
  }
  if (type == "CONFIRM_MOVE") {
    std::vector<vision::TokenId> tokens;
    const auto& arr = cmd.contains("tokens") ? cmd["tokens"] : Json();
    if (!arr.is_array()) throw Error(ErrorCode::SchemaError, "/tokens: expected array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto t = arr[i].is_string() ? vision::token_from_string(arr[i].get<std::string>()) : std::nullopt;
      if (!t) throw Error(ErrorCode::SchemaError, "/tokens/" + std::to_string(i) + ": unknown token");
      tokens.push_back(*t);
    }
    process(engine_.submit_move(player, tokens));
  } else if (type == "DICE_SUBMIT") {
    std::vector<int> dice;
    const auto& arr = cmd.contains("dice") ? cmd["dice"] : Json();
    if (!arr.is_array()) throw Error(ErrorCode::SchemaError, "/dice: expected array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number_integer()) throw Error(ErrorCode::SchemaError, "/dice/" + std::to_string(i) + ": expected integer");
      dice.push_back(arr[i].get<int>());
    }
    process(engine_.combat_round(player, dice));
  } else if (type == "BEHAVIOR_CHOICE") {
    const auto b = engine::behavior_from_string(require<std::string>(cmd, "behavior", ""));
    if (!b) throw Error(ErrorCode::SchemaError, "/behavior: unknown behavior");
    process(engine_.jailer(player, *b));
  } else if (type == "CRAFT_SUBMIT") {
    const auto it = crafts_.find(player);
    std::optional<vision::CraftRating> rating;
    bool late = false;
    if (it != crafts_.end()) {
      rating = it->second.rating;
      late = it->second.late;
    }
    auto events = engine_.craft(player, rating, late);
    crafts_.erase(player);
    process(std::move(events));
  } else if (type == "CRAFT_SKIP") {
    process(engine_.skip_craft(player));
  } else if (type == "ATTEMPT_KEY") {
    const auto it = keys_.find(player);
    if (it == keys_.end()) {
      if (st.hints.size() < 3) throw Error(ErrorCode::NotReady, "all three hints are needed before forging the key");
      throw Error(ErrorCode::NotReady, "no key scan for player " + std::to_string(player));
    }
    const bool ok = it->second;
    auto events = engine_.attempt_key(player, ok);
    keys_.erase(player);
    process(std::move(events));
  } else {
    throw Error(ErrorCode::SchemaError, "/type: unknown command '" + type + "'");
  }
}

Json Session::command(const Json& cmd) {
  std::lock_guard lock(mu_);
  record(MessageType::Command, cmd);
  const std::uint64_t from = log_.size();
  try {
    dispatch(cmd);
  } catch (const Error& e) {
    Json err{{"code", to_string(e.code())}, {"message", e.what()}, {"origin", "COMMAND"}};
    if (cmd.is_object() && cmd.contains("id")) err["command_id"] = cmd["id"];
    record(MessageType::Error, std::move(err));
    throw;
  } catch (const nlohmann::json::exception& e) {
    record(MessageType::Error, Json{{"code", "SCHEMA_ERROR"}, {"message", e.what()}, {"origin", "COMMAND"}});
    throw Error(ErrorCode::SchemaError, e.what());
  }
  return Json{{"ok", true}, {"seq_from", from + 1}, {"seq_to", log_.size()}};
}

Json Session::scan(const Json& req) {
  if (!req.is_object()) throw Error(ErrorCode::SchemaError, "scan: expected object");
  const auto kind = require<std::string>(req, "kind", "");
  if (kind != "DICE" && kind != "TOKENS" && kind != "WEAPON" && kind != "KEY") {
    throw Error(ErrorCode::SchemaError, "/kind: expected DICE, TOKENS, WEAPON or KEY");
  }
  int player = 0;
  {
    std::lock_guard lock(mu_);
    const auto& st = engine_.state();
    player = req.contains("player") ? require<int>(req, "player", "") : st.active;
    if (engine::to_string(st.phase) != phase_name_for(kind)) {
      throw Error(ErrorCode::PhaseMismatch,
                  kind + " scan not accepted in phase " + std::string(engine::to_string(st.phase)));
    }
    if (player != st.active) throw Error(ErrorCode::NotYourTurn, "player " + std::to_string(player) + " is not active");
  }
  const double mmpp = cfg_->mm_per_pixel;
  const vision::Raster raster = scan_raster(req, kind, mmpp);
  Json resp{{"kind", kind}, {"player", player}};

  if (kind == "DICE") {
    vision::DiceOptions o;
    o.mm_per_pixel = mmpp;
    const auto regions = vision::detect_dice_regions(raster, o);
    Json values = Json::array(), regs = Json::array();
    for (const auto& r : regions) {
      values.push_back(r.value);
      regs.push_back(Json{{"pips", r.pips}, {"value", r.value}, {"center", Json::array({r.center_x, r.center_y})}});
    }
    resp["values"] = values;
    resp["regions"] = regs;
    return resp;
  }
  if (kind == "TOKENS") {
    vision::MarkerOptions o;
    o.mm_per_pixel = mmpp;
    const auto dets = vision::order_tokens(vision::decode_markers(raster, o));
    const auto seq = vision::tokens_to_sequence(dets);
    Json toks = Json::array(), det = Json::array();
    for (const auto t : seq) toks.push_back(vision::to_string(t));
    for (const auto& d : dets) {
      det.push_back(Json{{"id", vision::to_string(d.id)}, {"rotation", d.rotation}, {"center", Json::array({d.center.x, d.center.y})}});
    }
    resp["tokens"] = toks;
    resp["detections"] = det;
    std::lock_guard lock(mu_);
    try {
      const auto path = engine::plan_path(engine_.state(), player, seq);
      Json pj = Json::array();
      for (const auto& c : path) pj.push_back(board::to_json(c));
      resp["path"] = pj;
      resp["rejected"] = nullptr;
    } catch (const Error& e) {
      resp["path"] = nullptr;
      resp["rejected"] = Json{{"code", to_string(e.code())}, {"message", e.what()}};
    }
    return resp;
  }
  const vision::Contour contour = vision::largest_contour(raster, mmpp);
  const auto& base = vision::default_baselines();
  if (kind == "WEAPON") {
    const vision::RarityThresholds t{cfg_->rarity_legendary, cfg_->rarity_rare};
    const auto rating = vision::classify_weapon(contour, base, t);
    const auto scores = vision::weapon_scores(contour, base);
    std::lock_guard lock(mu_);
    const double elapsed = craft_started_ ? opts_.clock() - *craft_started_ : 0.0;
    const bool late = elapsed > cfg_->craft_time_limit_s;
    crafts_[player] = Pending{rating, late};
    resp["rating"] = vision::to_json(rating);
    resp["scores"] = Json::array({scores[0], scores[1], scores[2]});
    resp["late"] = late;
    resp["elapsed_s"] = elapsed;
    resp["time_limit_s"] = cfg_->craft_time_limit_s;
    return resp;
  }
  const double score = vision::match_shapes(contour, base.key, vision::MirrorPolicy::TolerateMirror);
  const bool ok = score <= cfg_->key_threshold;
  std::lock_guard lock(mu_);
  keys_[player] = ok;
  resp["success"] = ok;
  resp["score"] = score;
  resp["threshold"] = cfg_->key_threshold;
  return resp;
}

int Session::subscribe(Listener fn) {
  std::lock_guard lock(mu_);
  listeners_[next_listener_] = std::move(fn);
  return next_listener_++;
}

void Session::unsubscribe(int token) {
  std::lock_guard lock(mu_);
  listeners_.erase(token);
}

Json Session::snapshot_locked() const {
  return Json{{"session", id_},
              {"last_seq", log_.size()},
              {"state", engine::to_json(engine_.state())},
              {"world", sim_.snapshot()},
              {"state_hash", engine::state_hash(engine_.state())},
              {"world_hash", sim_.hash()}};
}

Json Session::snapshot() const {
  std::lock_guard lock(mu_);
  return snapshot_locked();
}

Session::Attachment Session::attach(std::uint64_t after, Listener fn) {
  std::lock_guard lock(mu_);
  Attachment a;
  a.snapshot = snapshot_locked();
  if (after < log_.size()) a.tail.assign(log_.begin() + static_cast<std::ptrdiff_t>(after), log_.end());
  listeners_[next_listener_] = std::move(fn);
  a.token = next_listener_++;
  return a;
}

std::vector<ChannelMessage> Session::since(std::uint64_t after) const {
  std::lock_guard lock(mu_);
  if (after >= log_.size()) return {};
  return {log_.begin() + static_cast<std::ptrdiff_t>(after), log_.end()};
}

engine::GameState Session::state() const {
  std::lock_guard lock(mu_);
  return engine_.state();
}
std::string Session::state_hash() const {
  std::lock_guard lock(mu_);
  return engine::state_hash(engine_.state());
}
std::string Session::world_hash() const {
  std::lock_guard lock(mu_);
  return sim_.hash();
}
Json Session::world_snapshot() const {
  std::lock_guard lock(mu_);
  return sim_.snapshot();
}
std::vector<ChannelMessage> Session::log() const {
  std::lock_guard lock(mu_);
  return log_;
}

ReplayResult replay_log(std::istream& in) {
  std::string line;
  std::size_t ln = 0;
  const auto corrupt = [&](const std::string& why) {
    return Error(ErrorCode::CorruptLog, "line " + std::to_string(ln) + ": " + why);
  };
  ++ln;
  if (!std::getline(in, line)) throw corrupt("missing header");
  Json header;
  try {
    header = parse_json(line);
  } catch (const Error& e) {
    throw corrupt(e.what());
  }
  if (!header.is_object() || header.value("type", "") != "HEADER" || header.value("schema", "") != kLogSchema) {
    throw corrupt("not a " + std::string(kLogSchema) + " header");
  }
  std::shared_ptr<const board::GameConfig> cfg;
  try {
    cfg = std::make_shared<const board::GameConfig>(board::config_from_json(header.at("config")));
  } catch (const std::exception& e) {
    throw corrupt(std::string("config: ") + e.what());
  }
  ReplayResult out;
  out.state = engine::initial_state(cfg);
  sim::Simulator sim = make_twin(out.state);
  int next_job = 0;
  std::deque<std::pair<std::string, std::string>> expected;  // (job id + status, world hash)
  std::uint64_t seq = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) throw corrupt("empty line");
    ChannelMessage m;
    try {
      m = message_from_json(parse_json(line));
    } catch (const Error& e) {
      throw corrupt(e.what());
    }
    if (m.seq != ++seq) throw corrupt("sequence gap: expected " + std::to_string(seq));
    if (m.type == MessageType::GameEvent) {
      engine::SessionEvent e;
      try {
        e = engine::event_from_json(m.payload);
        engine::apply_event(out.state, e, true);
      } catch (const std::exception& ex) {
        throw corrupt(ex.what());
      }
      ++out.events;
      drive_motion(e, sim, *cfg, next_job, {}, [&](const motion::JobResult& r) {
        expected.emplace_back(r.job_id + ":" + std::string(to_string(r.status)), sim.hash());
      });
    } else if (m.type == MessageType::MotionProgress && m.payload.value("event", "") == "JOB_RESULT") {
      if (expected.empty()) throw corrupt("job result without a motion event");
      const auto& r = m.payload.at("result");
      const std::string key = r.value("job_id", "") + ":" + r.value("status", "");
      if (key != expected.front().first || m.payload.value("world_hash", "") != expected.front().second) {
        throw corrupt("motion result diverges from re-execution (" + key + ")");
      }
      expected.pop_front();
    }
  }
  if (!in.eof()) throw corrupt("read error");
  if (!expected.empty()) {
    ++ln;
    throw corrupt("log truncated: " + std::to_string(expected.size()) + " job result(s) missing");
  }
  out.state_hash = engine::state_hash(out.state);
  out.world = sim.snapshot();
  out.world_hash = sim.hash();
  return out;
}

ReplayResult replay_log_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return replay_log(in);
}

}  // namespace dm::session

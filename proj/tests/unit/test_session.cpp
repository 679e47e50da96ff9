// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dm/common/error.hpp"
#include "dm/common/hash.hpp"
#include "dm/session/session.hpp"
#include "dm/vision/raster.hpp"
#include "dm/vision/render.hpp"
#include "fixtures.hpp"

using namespace dm;
using namespace dm::session;
using engine::Phase;
using vision::TokenId;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Internal;
}

std::string error_text(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

SessionOptions fixed_clock(std::string log = {}) {
  SessionOptions o;
  o.log_path = std::move(log);
  o.clock = [] { return 0.0; };
  return o;
}

std::string raster_b64(const vision::Raster& r) { return base64_encode(vision::encode_pgm(r)); }

Json outline(WeaponKind k) {
  Json pl = Json::array();
  for (const auto& p : vision::default_baselines().weapons[static_cast<int>(k)].points) pl.push_back(to_json(p));
  return pl;
}

// Setup: every player crafts a BOW.
void skip_crafts(Session& s) {
  for (int p = 0; p < 3; ++p) {
    s.scan({{"kind", "WEAPON"}, {"polyline", outline(WeaponKind::Bow)}});
    s.command({{"type", "CRAFT_SUBMIT"}, {"player", p}});
  }
}

std::filesystem::path temp_log(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "dm_test_session";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Player 0 starts two steps from the dragon, which wakes on the first noise.
std::shared_ptr<const board::GameConfig> combat_config() {
  auto cfg = *test::shared_default();
  cfg.player_starts[0] = {3, 1};
  cfg.dragon_sleep_points = 2;
  cfg.validate();
  return test::share(cfg);
}

}  // namespace

TEST_SUITE("session") {

TEST_CASE("a new session opens in setup crafting") {
  Session s("t", test::shared_default(), fixed_clock());
  CHECK(s.state().phase == Phase::AwaitCraft);
  const auto log = s.log();
  REQUIRE_FALSE(log.empty());
  CHECK(log.front().payload["kind"] == "SESSION_STARTED");
  for (std::size_t i = 0; i < log.size(); ++i) CHECK(log[i].seq == i + 1);
}

TEST_CASE("scans are phase checked") {
  Session s("t", test::shared_default(), fixed_clock());
  const Json dice{{"kind", "DICE"}, {"raster", raster_b64(vision::render_dice(std::vector<int>{3}))}};
  CHECK(code_of([&] { s.scan(dice); }) == ErrorCode::PhaseMismatch);
  skip_crafts(s);
  REQUIRE(s.state().phase == Phase::AwaitMove);
  const Json weapon{{"kind", "WEAPON"}, {"polyline", Json::array({{0, 0}, {50, 0}, {50, 50}})}};
  CHECK(code_of([&] { s.scan(weapon); }) == ErrorCode::PhaseMismatch);
  CHECK(code_of([&] { s.scan(Json{{"kind", "SMELL"}}); }) == ErrorCode::SchemaError);
  CHECK(code_of([&] { s.scan(Json{{"kind", "TOKENS"}, {"player", 2}, {"raster", ""}}); }) == ErrorCode::NotYourTurn);
  CHECK(code_of([&] { s.scan(Json{{"kind", "TOKENS"}, {"raster", "AAAA"}}); }) == ErrorCode::ParseFailed);
  CHECK(code_of([&] { s.scan(Json{{"kind", "TOKENS"}}); }) == ErrorCode::SchemaError);
}

TEST_CASE("token scan echoes the plate and the planned path") {
  Session s("t", test::shared_default(), fixed_clock());
  skip_crafts(s);
  const std::vector<TokenId> ids{TokenId::MoveUp, TokenId::MoveUp, TokenId::MoveRight};
  const auto plate = vision::render_tokens(vision::layout_tokens(ids));
  const auto r = s.scan({{"kind", "TOKENS"}, {"raster", raster_b64(plate)}});
  CHECK(r["tokens"] == Json::array({"MOVE_UP", "MOVE_UP", "MOVE_RIGHT"}));
  CHECK(r["path"] == Json::array({{2, 6}, {2, 5}, {3, 5}}));
  CHECK(r["rejected"].is_null());
  // a scan never changes the game
  CHECK(s.state().phase == Phase::AwaitMove);
}

TEST_CASE("token scan reports a rejected path without throwing") {
  Session s("t", test::shared_default(), fixed_clock());
  skip_crafts(s);
  const std::vector<TokenId> ids{TokenId::MoveDown};
  const auto r = s.scan({{"kind", "TOKENS"}, {"raster", raster_b64(vision::render_tokens(vision::layout_tokens(ids)))}});
  CHECK(r["path"].is_null());
  CHECK(r["rejected"]["code"] == "INVALID_PATH");
}

TEST_CASE("confirm move streams motion progress before MOVED") {
  Session s("t", test::shared_default(), fixed_clock());
  skip_crafts(s);
  std::vector<ChannelMessage> seen;
  const int token = s.subscribe([&](const ChannelMessage& m) { seen.push_back(m); });
  const auto before = s.log().size();
  const auto ack = s.command({{"type", "CONFIRM_MOVE"}, {"player", 0}, {"tokens", {"MOVE_UP", "MOVE_UP"}}});
  s.unsubscribe(token);
  CHECK(ack["ok"] == true);
  CHECK(ack["seq_from"] == before + 2);
  const auto tail = s.since(before);
  REQUIRE(tail.size() == seen.size());
  for (std::size_t i = 0; i < tail.size(); ++i) CHECK(tail[i].seq == seen[i].seq);
  CHECK(tail.front().type == MessageType::Command);
  std::ptrdiff_t first_progress = -1, moved = -1;
  for (std::size_t i = 0; i < tail.size(); ++i) {
    if (tail[i].type == MessageType::MotionProgress && first_progress < 0) first_progress = static_cast<std::ptrdiff_t>(i);
    if (tail[i].type == MessageType::GameEvent && tail[i].payload["kind"] == "MOVED") moved = static_cast<std::ptrdiff_t>(i);
  }
  REQUIRE(first_progress > 0);
  REQUIRE(moved > first_progress);
  CHECK(s.state().players[0].figure.pos == board::GridPos{2, 5});
  const auto world = s.world_snapshot();
  const auto pose = world["world"]["figures"]["P0"]["pose"];
  const double x = pose[0], y = pose[1];
  CHECK(std::hypot(x - 95.0, y - 185.0) < 4.0);
}

TEST_CASE("command errors are logged and typed") {
  Session s("t", test::shared_default(), fixed_clock());
  skip_crafts(s);
  const auto h = s.state_hash();
  CHECK(code_of([&] { s.command({{"type", "CONFIRM_MOVE"}, {"player", 1}, {"tokens", Json::array()}}); }) ==
        ErrorCode::NotYourTurn);
  CHECK(s.log().back().type == MessageType::Error);
  CHECK(s.log().back().payload["code"] == "NOT_YOUR_TURN");
  CHECK(s.log().back().payload["origin"] == "COMMAND");
  const auto msg = error_text([&] { s.command({{"type", "CONFIRM_MOVE"}, {"player", 0}, {"tokens", {"MOVE_UP", "FLY"}}}); });
  CHECK(msg.find("/tokens/1") != std::string::npos);
  CHECK(code_of([&] { s.command({{"type", "TELEPORT"}, {"player", 0}}); }) == ErrorCode::SchemaError);
  CHECK(code_of([&] { s.command({{"player", 0}}); }) == ErrorCode::SchemaError);
  CHECK(code_of([&] { s.command({{"type", "DICE_SUBMIT"}, {"player", 0}, {"dice", {4}}}); }) == ErrorCode::PhaseMismatch);
  CHECK(code_of([&] { s.command({{"type", "ATTEMPT_KEY"}, {"player", 0}}); }) == ErrorCode::NotReady);
  CHECK(s.state_hash() == h);
}

TEST_CASE("dice scan during combat") {
  Session s("t", combat_config(), fixed_clock());
  skip_crafts(s);
  s.command({{"type", "CONFIRM_MOVE"}, {"player", 0}, {"tokens", {"MOVE_RIGHT", "MOVE_DOWN", "MOVE_RIGHT"}}});
  REQUIRE(s.state().phase == Phase::AwaitDice);
  const auto r = s.scan({{"kind", "DICE"}, {"raster", raster_b64(vision::render_dice(std::vector<int>{3}))}});
  CHECK(r["values"] == Json::array({4}));
  REQUIRE(r["regions"].size() == 1);
  CHECK(r["regions"][0]["pips"] == 3);
  const auto two = s.scan({{"kind", "DICE"}, {"raster", raster_b64(vision::render_dice(std::vector<int>{1, 6}))}});
  CHECK(two["values"] == Json::array({6, 1}));
  CHECK(code_of([&] { s.command({{"type", "DICE_SUBMIT"}, {"player", 0}, {"dice", {7}}}); }) == ErrorCode::BadDieValue);
  const auto h = s.state_hash();
  CHECK(code_of([&] { s.command({{"type", "DICE_SUBMIT"}, {"player", 0}, {"dice", {4}}}); }) == ErrorCode::BadDieValue);
  s.command({{"type", "DICE_SUBMIT"}, {"player", 0}, {"dice", {4, 2}}});
  CHECK(s.log().back().type == MessageType::GameEvent);
  CHECK(s.state_hash() != h);
}

TEST_CASE("weapon scan rates the outline and the craft uses it") {
  Session s("t", test::shared_default(), fixed_clock());
  const auto r = s.scan({{"kind", "WEAPON"}, {"polyline", outline(WeaponKind::Axe)}});
  CHECK(r["rating"]["weapon_kind"] == "AXE");
  CHECK(r["rating"]["rarity"] == "LEGENDARY");
  CHECK(r["late"] == false);
  s.command({{"type", "CRAFT_SUBMIT"}, {"player", 0}});
  const auto& w = s.state().players[0].figure.weapon;
  REQUIRE(w);
  CHECK(w->kind == WeaponKind::Axe);
}

TEST_CASE("late crafting is flagged from the session clock") {
  double now = 0;
  SessionOptions o;
  o.clock = [&] { return now; };
  Session s("t", test::shared_default(), o);
  now = 500;
  CHECK(s.scan({{"kind", "WEAPON"}, {"polyline", outline(WeaponKind::Sword)}})["late"] == true);
}

TEST_CASE("attach returns snapshot and tail atomically") {
  Session s("t", test::shared_default(), fixed_clock());
  skip_crafts(s);
  std::vector<std::uint64_t> live;
  const auto a = s.attach(5, [&](const ChannelMessage& m) { live.push_back(m.seq); });
  CHECK(a.snapshot["last_seq"] == s.log().size());
  REQUIRE_FALSE(a.tail.empty());
  CHECK(a.tail.front().seq == 6);
  CHECK(a.tail.back().seq == s.log().size());
  s.command({{"type", "CONFIRM_MOVE"}, {"player", 0}, {"tokens", Json::array()}});
  s.unsubscribe(a.token);
  REQUIRE_FALSE(live.empty());
  CHECK(live.front() == a.tail.back().seq + 1);
}

TEST_CASE("replay reproduces game and world state") {
  const auto path = temp_log("replay.jsonl");
  std::string state_hash, world_hash;
  {
    Session s("t", test::shared_default(), fixed_clock(path.string()));
    skip_crafts(s);
    s.command({{"type", "CONFIRM_MOVE"}, {"player", 0}, {"tokens", {"MOVE_UP", "MOVE_UP"}}});
    s.command({{"type", "CONFIRM_MOVE"}, {"player", 1}, {"tokens", {"MOVE_RIGHT"}}});
    CHECK_THROWS(s.command({{"type", "CONFIRM_MOVE"}, {"player", 0}, {"tokens", Json::array()}}));
    state_hash = s.state_hash();
    world_hash = s.world_hash();
  }
  const auto r = replay_log_file(path.string());
  CHECK(r.state_hash == state_hash);
  CHECK(r.world_hash == world_hash);

  SUBCASE("a missing record is a corrupt log naming the line") {
    auto lines = read_lines(path);
    REQUIRE(lines.size() > 10);
    lines.erase(lines.begin() + 10);
    std::stringstream ss;
    for (const auto& l : lines) ss << l << '\n';
    try {
      replay_log(ss);
      FAIL("expected CORRUPT_LOG");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CorruptLog);
      CHECK(std::string(e.what()).find("line 11") != std::string::npos);
    }
  }
  SUBCASE("a truncated line is a corrupt log") {
    auto lines = read_lines(path);
    std::stringstream ss;
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) ss << lines[i] << '\n';
    ss << lines.back().substr(0, lines.back().size() / 2) << '\n';
    CHECK(code_of([&] { replay_log(ss); }) == ErrorCode::CorruptLog);
  }
  SUBCASE("a tampered motion result is a corrupt log") {
    auto lines = read_lines(path);
    std::stringstream ss;
    bool tampered = false;
    for (auto l : lines) {
      const auto at = l.find("\"COMPLETED\"");
      if (!tampered && at != std::string::npos) {
        l.replace(at, 11, "\"FAILED\"");
        tampered = true;
      }
      ss << l << '\n';
    }
    REQUIRE(tampered);
    CHECK(code_of([&] { replay_log(ss); }) == ErrorCode::CorruptLog);
  }
  SUBCASE("a missing header is a corrupt log") {
    std::stringstream ss("{\"type\":\"GAME_EVENT\",\"seq\":1,\"payload\":{}}\n");
    CHECK(code_of([&] { replay_log(ss); }) == ErrorCode::CorruptLog);
  }
}

TEST_CASE("channel message round trip") {
  const ChannelMessage m{MessageType::MotionProgress, 42, Json{{"stage", "LIFT"}}};
  const auto back = message_from_json(to_json(m));
  CHECK(back.type == m.type);
  CHECK(back.seq == 42);
  CHECK(back.payload == m.payload);
  CHECK(code_of([] { message_from_json(Json{{"type", "NOPE"}, {"payload", 1}}); }) == ErrorCode::SchemaError);
}

}  // TEST_SUITE

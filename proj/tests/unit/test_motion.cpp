// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "dm/common/error.hpp"
#include "dm/engine/state.hpp"
#include "dm/motion/device.hpp"
#include "dm/motion/job.hpp"
#include "dm/motion/machine.hpp"
#include "dm/sim/simulator.hpp"
#include "fixtures.hpp"

using namespace dm;
using namespace dm::motion;
using board::DamageFlag;
using board::GridPos;

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

board::Figure player0() { return engine::initial_state(test::shared_default()).players[0].figure; }

GCodeProgram program(ProgramKind kind, std::vector<std::string> lines) {
  GCodeProgram p;
  p.kind = kind;
  p.lines = std::move(lines);
  return p;
}

std::vector<std::string> codes(const std::vector<Violation>& v) {
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(x.code);
  return out;
}

bool has_code(const std::vector<Violation>& v, const std::string& c) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.code == c; });
}

const Stage& only_stage(const MotionJob& j, StageKind k) {
  const Stage* found = nullptr;
  int n = 0;
  for (const auto& s : j.stages) {
    if (s.kind == k) {
      found = &s;
      ++n;
    }
  }
  REQUIRE(n == 1);
  return *found;
}

sim::Simulator make_sim(const board::GameConfig& cfg) { return sim::Simulator(cfg.machine, cfg.sim); }

}  // namespace

TEST_SUITE("motion") {

TEST_CASE("grid to machine coordinates") {
  const auto& cfg = *test::shared_default();
  CHECK(grid_to_machine({0, 0}, cfg) == MachinePos{35, 35, cfg.machine.travel_z});
  CHECK(grid_to_machine({3, 2}, cfg) == MachinePos{125, 95, cfg.machine.travel_z});
  CHECK(code_of([&] { grid_to_machine({13, 0}, cfg); }) == ErrorCode::OutOfEnvelope);
  CHECK(code_of([&] { grid_to_machine({0, -1}, cfg); }) == ErrorCode::OutOfEnvelope);
}

TEST_CASE("parse_line") {
  const auto s = parse_line("G1 X10.5 Y-2 F600 ; move");
  CHECK(s.command == "G1");
  CHECK(s.params.at('X') == 10.5);
  CHECK(s.params.at('Y') == -2.0);
  CHECK(s.comment == "move");
  CHECK(parse_line("; STAGE TRAVERSE").stage == StageKind::Traverse);
  CHECK(parse_line("").command.empty());
  CHECK(code_of([] { parse_line("g1 X1"); }) == ErrorCode::ParseFailed);
  CHECK(code_of([] { parse_line("G1 X1 X2"); }) == ErrorCode::ParseFailed);
  CHECK(code_of([] { parse_line("G1 Xabc"); }) == ErrorCode::ParseFailed);
  CHECK(code_of([] { parse_line("X1 G1"); }) == ErrorCode::ParseFailed);
  CHECK(code_of([] { parse_line("G1.5"); }) == ErrorCode::ParseFailed);
  CHECK(code_of([] { parse_line("; STAGE DANCE"); }) == ErrorCode::ParseFailed);
}

TEST_CASE("a compiled pick/place program validates clean") {
  const auto& cfg = *test::shared_default();
  const std::vector<GridPos> path{{2, 6}, {2, 5}};
  const auto job = compile_move_job(player0(), path, cfg);
  CHECK(validate_program(to_program(job), cfg.machine).empty());
}

TEST_CASE("validator rejects unsafe programs") {
  const auto& m = test::shared_default()->machine;
  const std::vector<std::string> head{"G90", "G21"};
  auto with = [&](ProgramKind k, std::vector<std::string> body) {
    auto lines = head;
    lines.insert(lines.end(), body.begin(), body.end());
    return validate_program(program(k, lines), m);
  };
  CHECK(has_code(with(ProgramKind::PickPlace, {"G1 X450 Y10 F600"}), "ENVELOPE"));
  CHECK(has_code(with(ProgramKind::PickPlace, {"G1 Z-1 F600"}), "ENVELOPE"));
  CHECK(has_code(with(ProgramKind::PickPlace, {"; STAGE CUT", "M3 S800", "M5"}), "LASER_OUTSIDE_CUT"));
  CHECK(has_code(with(ProgramKind::Cut, {"; STAGE LIFT", "M3 S800", "M5"}), "LASER_OUTSIDE_CUT"));
  CHECK(has_code(with(ProgramKind::Cut, {"; STAGE CUT", "M3 S2000", "M5"}), "LASER_POWER"));
  CHECK(has_code(with(ProgramKind::PickPlace, {"; STAGE LIFT", "M810 S1", "; STAGE RELEASE", "M810 S0"}), "MAGNET_MISUSE"));
  CHECK(has_code(with(ProgramKind::Cut, {"; STAGE GRIP", "M810 S1", "; STAGE RELEASE", "M810 S0"}), "MAGNET_MISUSE"));
  CHECK(has_code(with(ProgramKind::PickPlace, {"; STAGE GRIP", "M810 S2"}), "MAGNET_MISUSE"));
  CHECK(has_code(with(ProgramKind::PickPlace, {"; STAGE GRIP", "M810 S1"}), "MAGNET_ON_AT_END"));
  CHECK(has_code(with(ProgramKind::Cut, {"; STAGE CUT", "M3 S800"}), "LASER_ON_AT_END"));
  CHECK(has_code(with(ProgramKind::PickPlace, {"G1 Z20 F600", "; STAGE TRAVERSE", "G0 X10 Y10 F600"}), "TRAVERSE_BELOW_CLEARANCE"));
  CHECK(has_code(with(ProgramKind::PickPlace, {"; STAGE TRAVERSE", "G0 X10 Y10 F600"}), "TRAVERSE_BELOW_CLEARANCE"));
  CHECK(has_code(with(ProgramKind::PickPlace, {"G0 X10 F9000"}), "FEED_LIMIT"));
  CHECK(has_code(with(ProgramKind::PickPlace, {"G28"}), "UNKNOWN_WORD"));
  CHECK(has_code(with(ProgramKind::PickPlace, {"G4 X1"}), "UNKNOWN_WORD"));
  CHECK(has_code(with(ProgramKind::PickPlace, {"G1 X1 X2"}), "PARSE"));
  CHECK(has_code(validate_program(program(ProgramKind::PickPlace, {"G0 X10 Y10 F600", "G90"}), m), "MODE"));
  const auto v = with(ProgramKind::PickPlace, {"G0 X10 F600", "G1 X999 F600"});
  REQUIRE(v.size() == 1);
  CHECK(v[0].line == 4);
}

TEST_CASE("move job structure") {
  const auto& cfg = *test::shared_default();
  const std::vector<GridPos> one{{2, 6}};
  const auto j1 = compile_move_job(player0(), one, cfg);
  CHECK(only_stage(j1, StageKind::Traverse).waypoints.size() == 1);
  const std::vector<GridPos> ell{{2, 6}, {2, 5}, {3, 5}};
  const auto j3 = compile_move_job(player0(), ell, cfg);
  const auto& wp = only_stage(j3, StageKind::Traverse).waypoints;
  REQUIRE(wp.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(wp[i].x == cell_center(ell[i], cfg).x);
    CHECK(wp[i].y == cell_center(ell[i], cfg).y + board::standard_footprint().grip_nut.y);
  }
  CHECK(code_of([&] { compile_move_job(player0(), std::vector<GridPos>{}, cfg); }) == ErrorCode::InvalidPath);
  std::vector<StageKind> kinds;
  for (const auto& s : j3.stages) kinds.push_back(s.kind);
  using K = StageKind;
  CHECK(kinds == std::vector<K>{K::GotoCell, K::SenseMarker, K::Correct, K::Lower, K::Grip, K::Lift, K::Traverse,
                                K::Lower, K::Release, K::Lift});
}

TEST_CASE("compiled program matches the frozen golden file") {
  const auto& cfg = *test::shared_default();
  const std::vector<GridPos> path{{2, 6}, {2, 5}, {3, 5}};
  const auto text = to_program(compile_move_job(player0(), path, cfg, "job-1")).text();
  std::ifstream in(std::string(DM_TEST_DATA) + "/move_job_golden.gcode", std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(text == ss.str());
}

TEST_CASE("correct_offset") {
  const auto& m = test::shared_default()->machine;
  const Vec2 c{95, 245};
  CHECK(correct_offset({8, {c.x, c.y, 0}}, 8, c, m) == Correction{0, 0, 0});
  const auto d = correct_offset({8, {c.x + 2, c.y, 0}}, 8, c, m);
  CHECK(d.dx == doctest::Approx(2.0).epsilon(0.05));
  CHECK(d.dy == doctest::Approx(0.0).scale(1));
  const auto turned = correct_offset({8, {c.x, c.y, 350}}, 8, c, m);
  CHECK(turned.dtheta_deg == doctest::Approx(-10.0));
  CHECK(code_of([&] { correct_offset({8, {c.x + 15, c.y, 0}}, 8, c, m); }) == ErrorCode::CorrectionTooLarge);
  CHECK(code_of([&] { correct_offset({9, {c.x, c.y, 0}}, 8, c, m); }) == ErrorCode::WrongMarker);
}

TEST_CASE("simulator round trip recovers a 2 mm displacement") {
  auto cfg = *test::shared_default();
  cfg.sim.sigma_meas_mm = 0.0;
  auto s = make_sim(cfg);
  const Vec2 c = cell_center({2, 7}, cfg);
  s.add_figure("P0", 8, {c.x + 2, c.y, 0});
  s.execute(program(ProgramKind::PickPlace, {"G90", "G21", "G0 X" + fmt(c.x) + " Y" + fmt(c.y) + " F6000"}));
  const auto obs = s.sense();
  REQUIRE(obs);
  const auto d = correct_offset(*obs, 8, c, cfg.machine);
  CHECK(d.dx == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("cut job: laser segment inside the arm footprint") {
  const auto& cfg = *test::shared_default();
  const auto f = player0();
  const auto job = compile_cut_job(f, DamageFlag::LeftArm, cfg);
  const auto prog = to_program(job);
  CHECK(validate_program(prog, cfg.machine).empty());
  // walk the program and collect laser-on motion
  Vec2 at{};
  bool on = false;
  std::vector<std::pair<Vec2, Vec2>> lit;
  for (const auto& line : prog.lines) {
    const auto st = parse_line(line);
    if (st.command == "M3") on = st.params.count('S') && st.params.at('S') > 0;
    if (st.command == "M5") on = false;
    if (st.command == "G0" || st.command == "G1") {
      Vec2 next = at;
      if (st.params.count('X')) next.x = st.params.at('X');
      if (st.params.count('Y')) next.y = st.params.at('Y');
      if (on) lit.emplace_back(at, next);
      at = next;
    }
  }
  REQUIRE(lit.size() == 1);
  const Vec2 c = cell_center(f.pos, cfg);
  const auto& r = board::standard_footprint().left_arm;
  for (const Vec2 p : {lit[0].first, lit[0].second}) {
    const Vec2 l = p - c;
    CHECK(l.x >= r.min_x() - 0.5);
    CHECK(l.x <= r.max_x() + 0.5);
    CHECK(l.y >= r.min_y() - 0.5);
    CHECK(l.y <= r.max_y() + 0.5);
  }
  auto damaged = f;
  damaged.damage.insert(DamageFlag::LeftArm);
  CHECK(code_of([&] { compile_cut_job(damaged, DamageFlag::LeftArm, cfg); }) == ErrorCode::AlreadyDamaged);
}

TEST_CASE("runner: zero jitter lands exactly on the target") {
  auto cfg = *test::shared_default();
  cfg.sim.sigma_place_mm = 0;
  cfg.sim.sigma_meas_mm = 0;
  auto s = make_sim(cfg);
  const auto st = engine::initial_state(test::share(cfg));
  std::vector<board::Figure> figs;
  for (const auto& p : st.players) figs.push_back(p.figure);
  figs.push_back(st.dragon.figure);
  s.place_figures(figs, cfg);
  const std::vector<GridPos> path{{2, 6}, {2, 5}};
  std::vector<StageKind> seen;
  const auto r = run_motion_job(compile_move_job(figs[0], path, cfg), s, cfg, [&](const MotionProgress& p) { seen.push_back(p.stage); });
  CHECK(r.status == JobStatus::Completed);
  CHECK(r.grip_attempts == 1);
  const auto pose = s.board_pose("P0");
  REQUIRE(pose);
  const Vec2 target = cell_center({2, 5}, cfg);
  CHECK(pose->x == doctest::Approx(target.x));
  CHECK(pose->y == doctest::Approx(target.y));
  CHECK(std::find(seen.begin(), seen.end(), StageKind::Traverse) != seen.end());
  for (std::size_t i = 1; i < figs.size(); ++i) {
    const auto other = s.board_pose(figs[i].id);
    REQUIRE(other);
    CHECK(other->position() == cell_center(figs[i].pos, cfg));
  }
}

TEST_CASE("runner: a displaced figure is picked after correction") {
  auto cfg = *test::shared_default();
  cfg.sim.sigma_place_mm = 0;
  auto s = make_sim(cfg);
  const Vec2 c = cell_center({2, 7}, cfg);
  s.add_figure("P0", 8, {c.x + 3.5, c.y - 2.0, 12.0});
  auto f = player0();
  const std::vector<GridPos> path{{2, 6}};
  const auto r = run_motion_job(compile_move_job(f, path, cfg), s, cfg);
  CHECK(r.status == JobStatus::Completed);
  CHECK(r.correction.dx == doctest::Approx(3.5 - 4 * std::sin(deg_to_rad(12))).epsilon(0.1));
  const auto pose = s.board_pose("P0");
  REQUIRE(pose);
  CHECK(distance(pose->position(), cell_center({2, 6}, cfg)) < 1.5);
  CHECK(pose->theta_deg == doctest::Approx(0.0).scale(1));

  auto off = cfg;
  off.machine.correction_enabled = false;
  auto s2 = make_sim(off);
  s2.add_figure("P0", 8, {c.x + 5, c.y, 0});
  const auto miss = run_motion_job(compile_move_job(f, path, off), s2, off);
  CHECK(miss.status == JobStatus::Failed);
  CHECK(miss.error == std::optional<std::string>("GRIP_FAILED"));
}

TEST_CASE("runner: an occluded marker fails after the retry") {
  const auto& cfg = *test::shared_default();
  auto s = make_sim(cfg);
  const Vec2 c = cell_center({2, 7}, cfg);
  s.add_figure("P0", 8, {c.x, c.y, 0});
  s.set_occluded("P0", true);
  const std::vector<GridPos> path{{2, 6}};
  const auto r = run_motion_job(compile_move_job(player0(), path, cfg), s, cfg);
  CHECK(r.status == JobStatus::Failed);
  CHECK(r.error == std::optional<std::string>("GRIP_FAILED"));
  CHECK(r.grip_attempts == 2);
  CHECK(s.board_pose("P0")->position() == c);
}

TEST_CASE("runner: wrong marker under the head") {
  const auto& cfg = *test::shared_default();
  auto s = make_sim(cfg);
  const Vec2 c = cell_center({2, 7}, cfg);
  s.add_figure("X", 3, {c.x, c.y, 0});
  const std::vector<GridPos> path{{2, 6}};
  const auto r = run_motion_job(compile_move_job(player0(), path, cfg), s, cfg);
  CHECK(r.status == JobStatus::Failed);
  CHECK(r.error == std::optional<std::string>("WRONG_MARKER"));
}

TEST_CASE("runner: cut job severs the arm on the simulator") {
  const auto& cfg = *test::shared_default();
  auto s = make_sim(cfg);
  const auto f = player0();
  const Vec2 c = cell_center(f.pos, cfg);
  s.add_figure(f.id, f.marker_id, {c.x + 1, c.y - 1, 5});
  const auto r = run_motion_job(compile_cut_job(f, DamageFlag::LeftArm, cfg), s, cfg);
  CHECK(r.status == JobStatus::Completed);
  CHECK(s.damage(f.id) == std::set<DamageFlag>{DamageFlag::LeftArm});
  CHECK(s.board_pose(f.id)->position() == Vec2{c.x + 1, c.y - 1});
}

TEST_CASE("executed statements stay within the validated dialect") {
  const auto& cfg = *test::shared_default();
  auto s = make_sim(cfg);
  const auto f = player0();
  s.add_figure(f.id, f.marker_id, {cell_center(f.pos, cfg).x, cell_center(f.pos, cfg).y, 0});
  const std::vector<GridPos> path{{2, 6}, {2, 5}};
  const auto r = run_motion_job(compile_move_job(f, path, cfg), s, cfg);
  REQUIRE(r.status == JobStatus::Completed);
  CHECK(codes(validate_program(r.executed, cfg.machine)).empty());
}

}  // TEST_SUITE

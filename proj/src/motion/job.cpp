// SPDX-License-Identifier: Apache-2.0
#include "dm/motion/job.hpp"

#include <cmath>

namespace dm::motion {

namespace {

constexpr int kCameraSettleMs = 100;

std::string move_to(const char* g, Vec2 p, double feed) {
  return std::string(g) + " X" + fmt(p.x) + " Y" + fmt(p.y) + " F" + fmt(feed);
}
std::string z_to(double z, double feed) { return "G1 Z" + fmt(z) + " F" + fmt(feed); }

double wrap_deg(double a) {
  a = std::fmod(a + 180.0, 360.0);
  if (a < 0) a += 360.0;
  return a - 180.0;
}

void check_envelope(Vec2 p, const board::MachineConfig& m, const std::string& what) {
  if (!in_envelope({p.x, p.y, m.travel_z}, m)) {
    throw Error(ErrorCode::OutOfEnvelope, what + " (" + fmt(p.x) + ", " + fmt(p.y) + ") outside the envelope");
  }
}

Stage goto_stage(Vec2 center, const board::MachineConfig& m) {
  return {StageKind::GotoCell, {"G0 Z" + fmt(m.travel_z) + " F" + fmt(m.travel_feed), move_to("G0", center, m.travel_feed)}, {}};
}

Stage sense_stage() { return {StageKind::SenseMarker, {"G4 P" + std::to_string(kCameraSettleMs)}, {}}; }

GCodeProgram header_program(ProgramKind kind) {
  GCodeProgram p;
  p.kind = kind;
  p.lines = {"G90", "G21"};
  return p;
}

}  // namespace

std::string_view to_string(JobStatus s) {
  switch (s) {
    case JobStatus::Pending: return "PENDING";
    case JobStatus::Running: return "RUNNING";
    case JobStatus::Completed: return "COMPLETED";
    case JobStatus::Failed: return "FAILED";
  }
  return "?";
}

GCodeProgram to_program(const MotionJob& job) {
  GCodeProgram p;
  p.kind = job.kind;
  p.lines.push_back("; DM " + std::string(to_string(job.kind)) + " job=" + job.id + " figure=" + job.figure_id +
                    " marker=" + std::to_string(job.marker_id));
  const auto header = header_program(job.kind);
  p.lines.insert(p.lines.end(), header.lines.begin(), header.lines.end());
  for (const auto& s : job.stages) {
    p.lines.push_back("; STAGE " + std::string(to_string(s.kind)));
    p.lines.insert(p.lines.end(), s.lines.begin(), s.lines.end());
  }
  p.metadata = Json{{"job_id", job.id}, {"figure_id", job.figure_id}, {"marker_id", job.marker_id}};
  if (job.cut_target) {
    p.metadata["target"] = to_string(*job.cut_target);
  } else {
    Json path = Json::array();
    for (const auto& c : job.path) path.push_back(board::to_json(c));
    p.metadata["path"] = path;
  }
  return p;
}

Correction correct_offset(const MarkerObservation& observed, int expected_marker, Vec2 expected_center,
                          const board::MachineConfig& m, const board::FigureFootprint& fp) {
  if (observed.marker_id != expected_marker) {
    throw Error(ErrorCode::WrongMarker, "sensed marker " + std::to_string(observed.marker_id) + ", expected " +
                                            std::to_string(expected_marker));
  }
  const Vec2 sensed_nut = observed.pose.to_world(fp.grip_nut);
  const Vec2 nominal_nut = expected_center + fp.grip_nut;
  const Vec2 d = sensed_nut - nominal_nut;
  if (norm(d) > m.max_correction_mm) {
    throw Error(ErrorCode::CorrectionTooLarge,
                "offset " + fmt(norm(d)) + " mm exceeds " + fmt(m.max_correction_mm) + " mm");
  }
  return {d.x, d.y, wrap_deg(observed.pose.theta_deg)};
}

Stage correct_stage(Vec2 grip_point, double servo_deg, const board::MachineConfig& m) {
  return {StageKind::Correct, {move_to("G0", grip_point, m.travel_feed), "M811 A" + fmt(servo_deg)}, {}};
}

std::pair<Vec2, Vec2> cut_segment(const Pose& pose, board::DamageFlag target, const board::MachineConfig& m,
                                  const board::FigureFootprint& fp) {
  const auto& r = fp.part(target);
  const Vec2 a{r.min_x() - m.cut_overrun_mm, r.center.y};
  const Vec2 b{r.max_x() + m.cut_overrun_mm, r.center.y};
  return {pose.to_world(a), pose.to_world(b)};
}

Stage cut_stage(const Pose& figure_pose, board::DamageFlag target, const board::MachineConfig& m,
                const board::FigureFootprint& fp) {
  const auto [a, b] = cut_segment(figure_pose, target, m, fp);
  (void)a;
  return {StageKind::Cut,
          {z_to(m.focus_z, m.plunge_feed), "M3 S" + std::to_string(m.laser_power), move_to("G1", b, m.cut_feed), "M5"},
          {b}};
}

MotionJob compile_move_job(const board::Figure& figure, std::span<const board::GridPos> path,
                           const board::GameConfig& cfg, const std::string& job_id) {
  const auto& m = cfg.machine;
  const auto& fp = board::standard_footprint();
  if (path.empty()) throw Error(ErrorCode::InvalidPath, "move job needs at least one path cell");
  MotionJob job;
  job.id = job_id;
  job.kind = ProgramKind::PickPlace;
  job.figure_id = figure.id;
  job.marker_id = figure.marker_id;
  job.source = figure.pos;
  job.path.assign(path.begin(), path.end());

  const Vec2 src = grid_to_machine(figure.pos, cfg).xy();
  std::vector<Vec2> waypoints;
  for (const auto& c : path) {
    const Vec2 w = grid_to_machine(c, cfg).xy() + fp.grip_nut;
    check_envelope(w, m, "waypoint");
    waypoints.push_back(w);
  }
  check_envelope(src + fp.grip_nut, m, "grip point");

  job.stages.push_back(goto_stage(src, m));
  job.stages.push_back(sense_stage());
  job.stages.push_back(correct_stage(src + fp.grip_nut, 0.0, m));
  job.stages.push_back({StageKind::Lower, {z_to(m.grip_z, m.plunge_feed)}, {}});
  job.stages.push_back({StageKind::Grip, {"M810 S1", "G4 P" + fmt(m.dwell_ms)}, {}});
  job.stages.push_back({StageKind::Lift, {z_to(m.travel_z, m.plunge_feed)}, {}});
  Stage trav{StageKind::Traverse, {}, waypoints};
  for (const auto& w : waypoints) trav.lines.push_back(move_to("G0", w, m.travel_feed));
  job.stages.push_back(std::move(trav));
  job.stages.push_back({StageKind::Lower, {"M811 A" + fmt(0.0), z_to(m.grip_z, m.plunge_feed)}, {}});
  job.stages.push_back({StageKind::Release, {"M810 S0", "G4 P" + fmt(m.dwell_ms)}, {}});
  job.stages.push_back({StageKind::Lift, {z_to(m.travel_z, m.plunge_feed)}, {}});
  return job;
}

MotionJob compile_cut_job(const board::Figure& figure, board::DamageFlag target, const board::GameConfig& cfg,
                          const std::string& job_id) {
  if (figure.damage.count(target)) {
    throw Error(ErrorCode::AlreadyDamaged, figure.id + " " + std::string(to_string(target)) + " already severed");
  }
  const auto& m = cfg.machine;
  MotionJob job;
  job.id = job_id;
  job.kind = ProgramKind::Cut;
  job.figure_id = figure.id;
  job.marker_id = figure.marker_id;
  job.source = figure.pos;
  job.cut_target = target;

  const Vec2 c = grid_to_machine(figure.pos, cfg).xy();
  const Pose nominal{c.x, c.y, 0.0};
  const auto [a, b] = cut_segment(nominal, target, m);
  check_envelope(a, m, "cut start");
  check_envelope(b, m, "cut end");
  job.stages.push_back(goto_stage(c, m));
  job.stages.push_back(sense_stage());
  job.stages.push_back({StageKind::Correct, {move_to("G0", a, m.travel_feed)}, {a}});
  job.stages.push_back(cut_stage(nominal, target, m));
  job.stages.push_back({StageKind::Lift, {z_to(m.travel_z, m.plunge_feed)}, {}});
  return job;
}

}  // namespace dm::motion

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dm/board/config.hpp"
#include "dm/board/figure.hpp"
#include "dm/motion/gcode.hpp"
#include "dm/motion/machine.hpp"

namespace dm::motion {

struct Stage {
  StageKind kind = StageKind::GotoCell;
  std::vector<std::string> lines;
  std::vector<Vec2> waypoints;  // TRAVERSE: planar targets in order
};

enum class JobStatus { Pending, Running, Completed, Failed };
std::string_view to_string(JobStatus s);

struct MotionJob {
  std::string id;
  ProgramKind kind = ProgramKind::PickPlace;
  std::string figure_id;
  int marker_id = 0;
  board::GridPos source;
  std::vector<board::GridPos> path;           // PICK_PLACE
  std::optional<board::DamageFlag> cut_target;  // CUT
  std::vector<Stage> stages;
  JobStatus status = JobStatus::Pending;
};

/// Header lines, then every stage preceded by its "; STAGE" marker.
GCodeProgram to_program(const MotionJob& job);

/// Planar offset and heading error of a sensed figure relative to its
/// nominal pose (base centre on the cell centre, heading 0).
struct Correction {
  double dx = 0;
  double dy = 0;
  double dtheta_deg = 0;
  friend bool operator==(const Correction&, const Correction&) = default;
};

struct MarkerObservation {
  int marker_id = 0;
  Pose pose;  // marker centre and heading, machine frame
};

/// Grip nut offset between the sensed figure and its nominal pose, plus the
/// heading error the servo compensates. Throws WrongMarker or
/// CorrectionTooLarge (|(dx, dy)| > max_correction).
Correction correct_offset(const MarkerObservation& observed, int expected_marker, Vec2 expected_center,
                          const board::MachineConfig& m,
                          const board::FigureFootprint& fp = board::standard_footprint());

/// Nominal pick/place job (zero correction). Throws OutOfEnvelope.
MotionJob compile_move_job(const board::Figure& figure, std::span<const board::GridPos> path,
                           const board::GameConfig& cfg, const std::string& job_id = "job");
/// Nominal cut job severing `target` on a figure at its cell.
/// Throws AlreadyDamaged.
MotionJob compile_cut_job(const board::Figure& figure, board::DamageFlag target, const board::GameConfig& cfg,
                          const std::string& job_id = "job");

/// Stage builders shared by the compiler and the runtime re-planner.
Stage correct_stage(Vec2 grip_point, double servo_deg, const board::MachineConfig& m);
Stage cut_stage(const Pose& figure_pose, board::DamageFlag target, const board::MachineConfig& m,
                const board::FigureFootprint& fp = board::standard_footprint());
/// Laser-on segment (machine frame) for cutting `target` on a figure at `pose`.
std::pair<Vec2, Vec2> cut_segment(const Pose& pose, board::DamageFlag target, const board::MachineConfig& m,
                                  const board::FigureFootprint& fp = board::standard_footprint());

}  // namespace dm::motion

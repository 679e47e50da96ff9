// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dm/motion/job.hpp"

namespace dm::motion {

/// The gantry as seen by the job runner.
class Device {
 public:
  virtual ~Device() = default;
  /// Runs statements in order. Throws DeviceFault or InterpreterFault.
  virtual void execute(const GCodeProgram& program) = 0;
  /// Downward head camera: nearest marker in view, if any.
  virtual std::optional<MarkerObservation> sense() = 0;
  virtual MachinePos head() const = 0;
  virtual bool busy() const { return false; }
};

struct MotionProgress {
  std::string job_id;
  StageKind stage = StageKind::GotoCell;
  int stage_index = 0;
  int attempt = 1;
  MachinePos head;
  std::string detail;
};
Json to_json(const MotionProgress& p);

struct JobResult {
  std::string job_id;
  JobStatus status = JobStatus::Pending;
  std::optional<std::string> error;  // wire error code
  std::string message;
  int grip_attempts = 0;
  Correction correction;
  GCodeProgram executed;  // every statement sent to the device
};
Json to_json(const JobResult& r);

using ProgressFn = std::function<void(const MotionProgress&)>;

/// Executes a compiled job stage by stage. PICK_PLACE jobs sense the marker,
/// re-plan the grip with the measured offset, and verify the grip by checking
/// that the marker has left its cell; a failed or unsensed grip is retried
/// once after re-sensing. Device errors are reported in the result.
JobResult run_motion_job(const MotionJob& job, Device& device, const board::GameConfig& cfg,
                         const ProgressFn& progress = {});

}  // namespace dm::motion

// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "dm/motion/device.hpp"

namespace dm::motion {

Json to_json(const MotionProgress& p) {
  return Json{{"job_id", p.job_id},         {"stage", to_string(p.stage)}, {"stage_index", p.stage_index},
              {"attempt", p.attempt},       {"head", to_json(p.head)},     {"detail", p.detail}};
}

Json to_json(const JobResult& r) {
  Json j{{"job_id", r.job_id},
         {"status", to_string(r.status)},
         {"error", r.error ? Json(*r.error) : Json(nullptr)},
         {"message", r.message},
         {"grip_attempts", r.grip_attempts},
         {"correction", Json{{"dx", r.correction.dx}, {"dy", r.correction.dy}, {"dtheta", r.correction.dtheta_deg}}}};
  return j;
}

namespace {

class Runner {
 public:
  Runner(const MotionJob& job, Device& dev, const board::GameConfig& cfg, const ProgressFn& progress)
      : job_(job), dev_(dev), cfg_(cfg), progress_(progress) {
    result_.job_id = job.id;
    result_.executed.kind = job.kind;
  }

  JobResult run() {
    try {
      send({}, {"G90", "G21"}, std::nullopt, "");
      if (job_.kind == ProgramKind::PickPlace) {
        pick_place();
      } else {
        cut();
      }
      result_.status = JobStatus::Completed;
    } catch (const Error& e) {
      result_.status = JobStatus::Failed;
      result_.error = std::string(to_string(e.code()));
      result_.message = e.what();
    }
    return std::move(result_);
  }

 private:
  const Stage& stage_at(std::size_t i) const { return job_.stages.at(i); }

  void send(std::vector<std::string> prefix, const std::vector<std::string>& lines, std::optional<StageKind> kind,
            const std::string& detail) {
    GCodeProgram p;
    p.kind = job_.kind;
    if (kind) p.lines.push_back("; STAGE " + std::string(to_string(*kind)));
    p.lines.insert(p.lines.end(), prefix.begin(), prefix.end());
    p.lines.insert(p.lines.end(), lines.begin(), lines.end());
    dev_.execute(p);
    result_.executed.lines.insert(result_.executed.lines.end(), p.lines.begin(), p.lines.end());
    if (kind && progress_) {
      progress_(MotionProgress{job_.id, *kind, stage_index_++, attempt_, dev_.head(), detail});
    }
  }
  void run_stage(const Stage& s, const std::string& detail = "") { send({}, s.lines, s.kind, detail); }

  std::optional<MarkerObservation> sense(const std::string& why) {
    run_stage(stage_at(1), why);
    return dev_.sense();
  }

  void pick_place() {
    const auto& m = cfg_.machine;
    const auto& fp = board::standard_footprint();
    const Vec2 center = grid_to_machine(job_.source, cfg_).xy();
    bool gripped = false;
    for (attempt_ = 1; attempt_ <= 2 && !gripped; ++attempt_) {
      result_.grip_attempts = attempt_;
      if (attempt_ == 1) run_stage(stage_at(0));
      const auto obs = sense(attempt_ == 1 ? "sense" : "re-sense");
      if (!obs) continue;
      Correction corr;
      if (m.correction_enabled) {
        corr = correct_offset(*obs, job_.marker_id, center, m, fp);
      } else if (obs->marker_id != job_.marker_id) {
        throw Error(ErrorCode::WrongMarker, "sensed marker " + std::to_string(obs->marker_id));
      }
      result_.correction = corr;
      run_stage(correct_stage(center + fp.grip_nut + Vec2{corr.dx, corr.dy}, corr.dtheta_deg, m));
      for (std::size_t i = 3; i <= 5; ++i) run_stage(stage_at(i));  // LOWER, GRIP, LIFT
      const auto after = dev_.sense();
      gripped = !(after && after->marker_id == job_.marker_id);
      if (!gripped) run_stage({StageKind::Release, {"M810 S0"}, {}}, "grip missed");
    }
    attempt_ = result_.grip_attempts;
    if (!gripped) {
      throw Error(ErrorCode::GripFailed, job_.figure_id + " not gripped after " +
                                             std::to_string(result_.grip_attempts) + " attempts");
    }
    for (std::size_t i = 6; i < job_.stages.size(); ++i) run_stage(stage_at(i));
  }

  void cut() {
    const auto& m = cfg_.machine;
    const Vec2 center = grid_to_machine(job_.source, cfg_).xy();
    run_stage(stage_at(0));
    auto obs = sense("sense");
    if (!obs) obs = sense("re-sense");
    if (!obs) throw Error(ErrorCode::DeviceFault, "marker of " + job_.figure_id + " not visible");
    if (obs->marker_id != job_.marker_id) {
      throw Error(ErrorCode::WrongMarker, "sensed marker " + std::to_string(obs->marker_id));
    }
    Pose pose{center.x, center.y, 0.0};
    if (m.correction_enabled) {
      const auto corr = correct_offset(*obs, job_.marker_id, center, m);
      result_.correction = corr;
      pose = obs->pose;
    }
    const auto [a, b] = cut_segment(pose, *job_.cut_target, m);
    for (const Vec2 p : {a, b}) {
      if (!in_envelope({p.x, p.y, m.focus_z}, m)) throw Error(ErrorCode::OutOfEnvelope, "cut outside envelope");
    }
    run_stage({StageKind::Correct, {"G0 X" + fmt(a.x) + " Y" + fmt(a.y) + " F" + fmt(m.travel_feed)}, {a}});
    run_stage(cut_stage(pose, *job_.cut_target, m));
    run_stage(stage_at(4));
  }

  const MotionJob& job_;
  Device& dev_;
  const board::GameConfig& cfg_;
  const ProgressFn& progress_;
  JobResult result_;
  int attempt_ = 1;
  int stage_index_ = 0;
};

}  // namespace

JobResult run_motion_job(const MotionJob& job, Device& device, const board::GameConfig& cfg,
                         const ProgressFn& progress) {
  if (device.busy()) {
    JobResult r;
    r.job_id = job.id;
    r.status = JobStatus::Failed;
    r.error = "DEVICE_FAULT";
    r.message = "device busy";
    return r;
  }
  return Runner(job, device, cfg, progress).run();
}

}  // namespace dm::motion

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dm/board/config.hpp"
#include "dm/board/figure.hpp"
#include "dm/common/rng.hpp"
#include "dm/motion/device.hpp"

namespace dm::sim {

struct DeviceState {
  motion::MachinePos head;
  bool magnet = false;
  double servo_deg = 0;
  int laser_power = 0;
  double feed = 0;
  bool absolute = false;
  std::optional<std::string> fault;
};

struct Segment {
  Vec2 a;
  Vec2 b;
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct FigureBody {
  int marker_id = 0;
  std::optional<Pose> pose;  // empty while held
  std::set<board::DamageFlag> damage;
  friend bool operator==(const FigureBody&, const FigureBody&) = default;
};

struct WorldState {
  std::map<std::string, FigureBody> figures;
  std::optional<std::string> held;
  Vec2 held_offset;  // grip nut relative to the magnet axis, machine frame
  double held_theta_deg = 0;
  std::map<std::string, std::vector<Segment>> scars;
  Rng rng{1};
  double time_s = 0;
};

/// Line segment against an axis-aligned rectangle: true when the segment
/// enters through one side and leaves through the opposite side.
bool crosses_rect(Vec2 a, Vec2 b, const board::LocalRect& r);
bool touches_rect(Vec2 a, Vec2 b, const board::LocalRect& r);
bool touches_disc(Vec2 a, Vec2 b, Vec2 c, double radius);

/// Nearest unoccluded marker whose centre lies within opts.fov_mm of the
/// head, with Gaussian measurement noise drawn from the world stream.
std::optional<motion::MarkerObservation> head_camera_view(const DeviceState& dev, WorldState& world,
                                                          const board::SimOptions& opts,
                                                          const std::set<std::string>& occluded = {});

/// Digital twin of the gantry: G-code interpreter plus physical world.
class Simulator final : public motion::Device {
 public:
  Simulator(board::MachineConfig machine, board::SimOptions opts,
            board::FigureFootprint footprint = board::standard_footprint());

  void add_figure(const std::string& id, int marker_id, Pose pose);
  /// Places every figure of the game at its cell centre, heading 0.
  void place_figures(const std::vector<board::Figure>& figures, const board::GameConfig& cfg);

  void execute(const motion::GCodeProgram& program) override;
  std::optional<motion::MarkerObservation> sense() override;
  motion::MachinePos head() const override { return dev_.head; }

  std::optional<Pose> board_pose(const std::string& id) const;
  const std::set<board::DamageFlag>& damage(const std::string& id) const;
  void set_occluded(const std::string& id, bool occluded);
  /// Wall-clock pacing at opts.speed simulated seconds per second.
  void set_pacing(bool on) { pacing_ = on; }

  const DeviceState& device() const { return dev_; }
  const WorldState& world() const { return world_; }
  const board::SimOptions& options() const { return opts_; }

  /// Trace records since the last drain (GRIPPED, GRIP_MISSED, RELEASED, SCAR, DAMAGED).
  std::vector<Json> drain_trace();

  Json snapshot() const;
  void restore(const Json& snapshot);
  std::string hash() const;

 private:
  void run(const motion::Statement& st, int line);
  void move(std::optional<double> x, std::optional<double> y, std::optional<double> z, std::optional<double> f,
            int line);
  void magnet_on();
  void magnet_off();
  void record_cut(Vec2 a, Vec2 b);
  void advance(double seconds);
  void trace(std::string kind, Json detail);

  board::MachineConfig machine_;
  board::SimOptions opts_;
  board::FigureFootprint fp_;
  DeviceState dev_;
  WorldState world_;
  std::set<std::string> occluded_;
  std::vector<Json> trace_;
  bool pacing_ = false;
  double pending_sleep_s_ = 0;
};

}  // namespace dm::sim

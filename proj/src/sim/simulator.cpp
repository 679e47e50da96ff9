// SPDX-License-Identifier: Apache-2.0
#include "dm/sim/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "dm/common/hash.hpp"
#include "dm/motion/machine.hpp"

namespace dm::sim {

namespace {

constexpr double kZTol = 0.5;

// Liang-Barsky clip; returns (t0, t1, entry edge, exit edge) with edges
// numbered 0 left, 1 right, 2 bottom (min y), 3 top (max y).
struct Clip {
  double t0 = 0, t1 = 1;
  int in_edge = -1, out_edge = -1;
};

std::optional<Clip> clip(Vec2 a, Vec2 b, const board::LocalRect& r) {
  const Vec2 d = b - a;
  Clip c;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {a.x - r.min_x(), r.max_x() - a.x, a.y - r.min_y(), r.max_y() - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0) {
      if (q[i] < 0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0) {
      if (t > c.t0) {
        c.t0 = t;
        c.in_edge = i;
      }
    } else if (t < c.t1) {
      c.t1 = t;
      c.out_edge = i;
    }
  }
  if (c.t0 > c.t1) return std::nullopt;
  return c;
}

Vec2 to_local(const Pose& body, Vec2 world) { return rotate(world - body.position(), -deg_to_rad(body.theta_deg)); }

Json pose_json(const Pose& p) { return Json::array({p.x, p.y, p.theta_deg}); }

}  // namespace

bool crosses_rect(Vec2 a, Vec2 b, const board::LocalRect& r) {
  const auto c = clip(a, b, r);
  if (!c || c->in_edge < 0 || c->out_edge < 0) return false;
  return (c->in_edge / 2 == c->out_edge / 2) && c->in_edge != c->out_edge;
}

bool touches_rect(Vec2 a, Vec2 b, const board::LocalRect& r) { return clip(a, b, r).has_value(); }

bool touches_disc(Vec2 a, Vec2 b, Vec2 c, double radius) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  const double t = len2 > 0 ? std::clamp(dot(c - a, d) / len2, 0.0, 1.0) : 0.0;
  return distance(a + d * t, c) <= radius;
}

std::optional<motion::MarkerObservation> head_camera_view(const DeviceState& dev, WorldState& world,
                                                          const board::SimOptions& opts,
                                                          const std::set<std::string>& occluded) {
  const Vec2 h = dev.head.xy();
  const FigureBody* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [id, f] : world.figures) {
    if (!f.pose || occluded.count(id)) continue;
    const double d = distance(f.pose->position(), h);
    if (d <= opts.fov_mm && d < best_d) {
      best = &f;
      best_d = d;
    }
  }
  if (!best) return std::nullopt;
  motion::MarkerObservation obs{best->marker_id, *best->pose};
  if (opts.sigma_meas_mm > 0) {
    obs.pose.x += opts.sigma_meas_mm * world.rng.normal();
    obs.pose.y += opts.sigma_meas_mm * world.rng.normal();
  }
  return obs;
}

Simulator::Simulator(board::MachineConfig machine, board::SimOptions opts, board::FigureFootprint footprint)
    : machine_(machine), opts_(opts), fp_(footprint) {
  dev_.head = {0, 0, machine_.travel_z};
  dev_.feed = machine_.travel_feed;
  world_.rng = Rng(opts_.seed);
}

void Simulator::add_figure(const std::string& id, int marker_id, Pose pose) {
  world_.figures[id] = FigureBody{marker_id, pose, {}};
}

void Simulator::place_figures(const std::vector<board::Figure>& figures, const board::GameConfig& cfg) {
  for (const auto& f : figures) {
    const Vec2 c = motion::cell_center(f.pos, cfg);
    add_figure(f.id, f.marker_id, {c.x, c.y, 0.0});
    world_.figures[f.id].damage = f.damage;
  }
}

std::optional<Pose> Simulator::board_pose(const std::string& id) const {
  const auto it = world_.figures.find(id);
  if (it == world_.figures.end()) return std::nullopt;
  return it->second.pose;
}

const std::set<board::DamageFlag>& Simulator::damage(const std::string& id) const {
  static const std::set<board::DamageFlag> none;
  const auto it = world_.figures.find(id);
  return it == world_.figures.end() ? none : it->second.damage;
}

void Simulator::set_occluded(const std::string& id, bool occluded) {
  if (occluded) {
    occluded_.insert(id);
  } else {
    occluded_.erase(id);
  }
}

std::optional<motion::MarkerObservation> Simulator::sense() {
  return head_camera_view(dev_, world_, opts_, occluded_);
}

std::vector<Json> Simulator::drain_trace() { return std::exchange(trace_, {}); }

void Simulator::trace(std::string kind, Json detail) {
  Json j{{"t", world_.time_s}, {"kind", std::move(kind)}};
  for (auto& [k, v] : detail.items()) j[k] = v;
  trace_.push_back(std::move(j));
}

void Simulator::advance(double seconds) {
  world_.time_s += seconds;
  if (pacing_ && opts_.speed > 0) pending_sleep_s_ += seconds / opts_.speed;
}

void Simulator::execute(const motion::GCodeProgram& program) {
  for (std::size_t i = 0; i < program.lines.size(); ++i) {
    motion::Statement st;
    try {
      st = motion::parse_line(program.lines[i]);
    } catch (const Error& e) {
      dev_.fault = e.what();
      throw Error(ErrorCode::InterpreterFault, "line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (!st.command.empty()) run(st, static_cast<int>(i) + 1);
  }
  if (pending_sleep_s_ > 0) {
    std::this_thread::sleep_for(std::chrono::duration<double>(pending_sleep_s_));
    pending_sleep_s_ = 0;
  }
}

void Simulator::run(const motion::Statement& st, int line) {
  const auto param = [&](char c) -> std::optional<double> {
    const auto it = st.params.find(c);
    if (it == st.params.end()) return std::nullopt;
    return it->second;
  };
  const auto fault = [&](const std::string& msg) {
    dev_.fault = msg;
    throw Error(ErrorCode::InterpreterFault, "line " + std::to_string(line) + ": " + msg);
  };
  const std::string& c = st.command;
  if (c == "G90") {
    dev_.absolute = true;
  } else if (c == "G21") {
  } else if (c == "G0" || c == "G1") {
    if (!dev_.absolute) fault("motion before G90");
    move(param('X'), param('Y'), param('Z'), param('F'), line);
  } else if (c == "G4") {
    advance(param('P').value_or(0) / 1000.0);
  } else if (c == "M810") {
    const double s = param('S').value_or(-1);
    if (s == 1) {
      magnet_on();
    } else if (s == 0) {
      magnet_off();
    } else {
      fault("M810 requires S0 or S1");
    }
  } else if (c == "M811") {
    const double a = param('A').value_or(0);
    const double delta = a - dev_.servo_deg;
    if (world_.held) {
      world_.held_offset = rotate(world_.held_offset, deg_to_rad(delta));
      world_.held_theta_deg += delta;
    }
    dev_.servo_deg = a;
  } else if (c == "M3") {
    const double s = param('S').value_or(0);
    if (s < 0 || s > machine_.max_laser_power) fault("laser power out of range");
    dev_.laser_power = static_cast<int>(s);
  } else if (c == "M5") {
    dev_.laser_power = 0;
  } else {
    fault("unsupported command " + c);
  }
}

void Simulator::move(std::optional<double> x, std::optional<double> y, std::optional<double> z,
                     std::optional<double> f, int line) {
  const motion::MachinePos from = dev_.head;
  motion::MachinePos to{x.value_or(from.x), y.value_or(from.y), z.value_or(from.z)};
  if (!motion::in_envelope(to, machine_)) {
    dev_.fault = "target outside envelope";
    throw Error(ErrorCode::InterpreterFault, "line " + std::to_string(line) + ": target outside envelope");
  }
  if (f) {
    if (*f <= 0 || *f > machine_.max_feed) {
      dev_.fault = "feed out of range";
      throw Error(ErrorCode::InterpreterFault, "line " + std::to_string(line) + ": feed out of range");
    }
    dev_.feed = *f;
  }
  const double len = std::sqrt((to.x - from.x) * (to.x - from.x) + (to.y - from.y) * (to.y - from.y) +
                               (to.z - from.z) * (to.z - from.z));
  advance(len / dev_.feed * 60.0);
  if (dev_.laser_power > 0 && std::fabs(from.z - machine_.focus_z) <= kZTol &&
      std::fabs(to.z - machine_.focus_z) <= kZTol && (from.xy() - to.xy()) != Vec2{}) {
    record_cut(from.xy(), to.xy());
  }
  dev_.head = to;
}

void Simulator::magnet_on() {
  dev_.magnet = true;
  if (world_.held || dev_.head.z > machine_.grip_z + 1e-9) return;
  const Vec2 axis = dev_.head.xy();
  std::string best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [id, f] : world_.figures) {
    if (!f.pose) continue;
    const double d = distance(f.pose->to_world(fp_.grip_nut), axis);
    if (d < best_d) {
      best_d = d;
      best = id;
    }
  }
  if (!best.empty() && best_d <= machine_.capture_radius_mm) {
    auto& f = world_.figures[best];
    world_.held = best;
    world_.held_offset = f.pose->to_world(fp_.grip_nut) - axis;
    world_.held_theta_deg = f.pose->theta_deg;
    f.pose.reset();
    trace("GRIPPED", {{"figure", best}, {"offset_mm", best_d}});
  } else {
    trace("GRIP_MISSED", {{"nearest", best}, {"distance_mm", best.empty() ? Json(nullptr) : Json(best_d)}});
  }
}

void Simulator::magnet_off() {
  dev_.magnet = false;
  if (!world_.held) return;
  const std::string id = *world_.held;
  const Vec2 nut = dev_.head.xy() + world_.held_offset;
  const double th = world_.held_theta_deg;
  Vec2 base = nut - rotate(fp_.grip_nut, deg_to_rad(th));
  if (opts_.sigma_place_mm > 0) {
    Vec2 j;
    do {
      j = {world_.rng.normal(), world_.rng.normal()};
    } while (norm(j) > 2.0);
    base = base + j * opts_.sigma_place_mm;
  }
  world_.figures[id].pose = Pose{base.x, base.y, th};
  world_.held.reset();
  world_.held_offset = {};
  world_.held_theta_deg = 0;
  trace("RELEASED", {{"figure", id}, {"pose", pose_json(*world_.figures[id].pose)}});
}

void Simulator::record_cut(Vec2 a, Vec2 b) {
  for (auto& [id, f] : world_.figures) {
    if (!f.pose) continue;
    const Pose body = *f.pose;
    const Vec2 la = to_local(body, a);
    const Vec2 lb = to_local(body, b);
    bool hit = touches_disc(la, lb, {0, 0}, fp_.base_diameter_mm / 2);
    for (const auto flag : {board::DamageFlag::LeftArm, board::DamageFlag::RightArm, board::DamageFlag::Weapon}) {
      const auto& r = fp_.part(flag);
      if (!touches_rect(la, lb, r)) continue;
      hit = true;
      if (crosses_rect(la, lb, r) && f.damage.insert(flag).second) {
        trace("DAMAGED", {{"figure", id}, {"flag", to_string(flag)}});
      }
    }
    if (hit) {
      world_.scars[id].push_back({a, b});
      trace("SCAR", {{"figure", id}, {"a", to_json(a)}, {"b", to_json(b)}});
    }
  }
}

Json Simulator::snapshot() const {
  Json figs = Json::object();
  for (const auto& [id, f] : world_.figures) {
    Json dmg = Json::array();
    for (const auto d : f.damage) dmg.push_back(to_string(d));
    figs[id] = Json{{"marker_id", f.marker_id}, {"pose", f.pose ? pose_json(*f.pose) : Json(nullptr)}, {"damage", dmg}};
  }
  Json scars = Json::object();
  for (const auto& [id, list] : world_.scars) {
    Json arr = Json::array();
    for (const auto& s : list) arr.push_back(Json::array({to_json(s.a), to_json(s.b)}));
    scars[id] = arr;
  }
  Json occ = Json::array();
  for (const auto& id : occluded_) occ.push_back(id);
  return Json{
      {"device",
       {{"head", motion::to_json(dev_.head)},
        {"magnet", dev_.magnet},
        {"servo_deg", dev_.servo_deg},
        {"laser_power", dev_.laser_power},
        {"feed", dev_.feed},
        {"absolute", dev_.absolute},
        {"fault", dev_.fault ? Json(*dev_.fault) : Json(nullptr)}}},
      {"world",
       {{"figures", figs},
        {"held", world_.held ? Json(*world_.held) : Json(nullptr)},
        {"held_offset", to_json(world_.held_offset)},
        {"held_theta_deg", world_.held_theta_deg},
        {"scars", scars},
        {"rng", {{"seed", world_.rng.seed()}, {"draws", world_.rng.draws()}}},
        {"time_s", world_.time_s},
        {"occluded", occ}}},
  };
}

void Simulator::restore(const Json& j) {
  try {
    const auto& d = j.at("device");
    dev_.head = motion::machine_pos_from_json(d.at("head"), "/device/head");
    dev_.magnet = d.at("magnet").get<bool>();
    dev_.servo_deg = d.at("servo_deg").get<double>();
    dev_.laser_power = d.at("laser_power").get<int>();
    dev_.feed = d.at("feed").get<double>();
    dev_.absolute = d.at("absolute").get<bool>();
    dev_.fault = d.at("fault").is_null() ? std::nullopt : std::optional(d.at("fault").get<std::string>());
    const auto& w = j.at("world");
    world_.figures.clear();
    for (const auto& [id, f] : w.at("figures").items()) {
      FigureBody b;
      b.marker_id = f.at("marker_id").get<int>();
      if (!f.at("pose").is_null()) {
        const auto& p = f.at("pose");
        b.pose = Pose{p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
      }
      for (const auto& s : f.at("damage")) {
        const auto flag = board::damage_flag_from_string(s.get<std::string>());
        if (!flag) throw Error(ErrorCode::SchemaError, "/world/figures/" + id + "/damage: unknown flag");
        b.damage.insert(*flag);
      }
      world_.figures[id] = std::move(b);
    }
    world_.held = w.at("held").is_null() ? std::nullopt : std::optional(w.at("held").get<std::string>());
    world_.held_offset = vec2_from_json(w.at("held_offset"), "/world/held_offset");
    world_.held_theta_deg = w.at("held_theta_deg").get<double>();
    world_.scars.clear();
    for (const auto& [id, list] : w.at("scars").items()) {
      for (const auto& s : list) {
        world_.scars[id].push_back({vec2_from_json(s.at(0), "/world/scars"), vec2_from_json(s.at(1), "/world/scars")});
      }
    }
    world_.rng = Rng::restore(w.at("rng").at("seed").get<std::uint64_t>(), w.at("rng").at("draws").get<std::uint64_t>());
    world_.time_s = w.at("time_s").get<double>();
    occluded_.clear();
    for (const auto& id : w.at("occluded")) occluded_.insert(id.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("world snapshot: ") + e.what());
  }
}

std::string Simulator::hash() const { return sha256_hex(snapshot().dump()); }

}  // namespace dm::sim

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dm/engine/engine.hpp"
#include "dm/sim/simulator.hpp"
#include "dm/vision/shapes.hpp"

namespace dm::session {

inline constexpr std::string_view kLogSchema = "dm.session-log/1";
inline constexpr std::string_view kMessageSchema = "dm.channel/1";

enum class MessageType { GameEvent, MotionProgress, StateSnapshot, Command, Error };
std::string_view to_string(MessageType t);
std::optional<MessageType> message_type_from_string(std::string_view s);

/// Log record and broadcast unit. `seq` is the session-wide log position;
/// transports renumber per connection.
struct ChannelMessage {
  MessageType type = MessageType::GameEvent;
  std::uint64_t seq = 0;
  Json payload;
};
Json to_json(const ChannelMessage& m);
ChannelMessage message_from_json(const Json& j);

using Clock = std::function<double()>;  // seconds, monotonic
Clock steady_clock();

struct SessionOptions {
  /// JSON-lines log, written ahead of every broadcast. Empty disables.
  std::string log_path;
  Clock clock;  // craft timer; steady_clock() when unset
  bool pacing = false;  // sleep the simulator at cfg.sim.speed
};

using Listener = std::function<void(const ChannelMessage&)>;

/// One game: engine, digital twin and the scan/command surface. All public
/// members are thread-safe; mutations are serialized in arrival order under
/// one lock, which is also the total order of the log.
class Session {
 public:
  Session(std::string id, std::shared_ptr<const board::GameConfig> cfg, SessionOptions opts = {});
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const { return id_; }

  /// Synchronous scan. Request: {kind, player?, raster (base64 PGM) | polyline}.
  /// Throws PhaseMismatch, ParseFailed or SchemaError.
  Json scan(const Json& request);
  /// Applies a COMMAND payload {type, player, ...}; returns {ok, seq_from,
  /// seq_to}. Throws dm::Error (SchemaError, NotYourTurn, ...) after logging
  /// an ERROR record.
  Json command(const Json& cmd);

  int subscribe(Listener fn);
  void unsubscribe(int token);

  struct Attachment {
    int token = -1;
    Json snapshot;
    std::vector<ChannelMessage> tail;  // seq > after
  };
  /// Snapshot, tail and subscription taken atomically, so a resuming client
  /// sees every record exactly once.
  Attachment attach(std::uint64_t after, Listener fn);

  /// {session, last_seq, state, world}.
  Json snapshot() const;
  /// Logged messages with seq > after.
  std::vector<ChannelMessage> since(std::uint64_t after) const;

  engine::GameState state() const;
  std::string state_hash() const;
  std::string world_hash() const;
  Json world_snapshot() const;
  std::vector<ChannelMessage> log() const;
  const board::GameConfig& config() const { return *cfg_; }

 private:
  struct Pending {
    vision::CraftRating rating;
    bool late = false;
  };
  Json snapshot_locked() const;
  void record(MessageType type, Json payload);
  void record_events(const std::vector<engine::SessionEvent>& events);
  void process(std::vector<engine::SessionEvent> events);
  void dispatch(const Json& cmd);
  void require_scan_phase(engine::Phase want, const Json& req, int* player) const;

  std::string id_;
  std::shared_ptr<const board::GameConfig> cfg_;
  SessionOptions opts_;
  mutable std::mutex mu_;
  engine::Engine engine_;
  sim::Simulator sim_;
  std::vector<ChannelMessage> log_;
  std::unique_ptr<std::ofstream> out_;
  std::map<int, Listener> listeners_;
  int next_listener_ = 0;
  int next_job_ = 0;
  std::optional<double> craft_started_;
  std::map<int, Pending> crafts_;
  std::map<int, bool> keys_;
};

/// Runs the motion jobs an event calls for (player and dragon moves, damage
/// cuts) on the twin. Live play and replay share this path. `on_result`
/// fires after each job.
std::vector<motion::JobResult> drive_motion(const engine::SessionEvent& e, sim::Simulator& sim,
                                            const board::GameConfig& cfg, int& next_job,
                                            const motion::ProgressFn& progress,
                                            const std::function<void(const motion::JobResult&)>& on_result);

/// Fresh twin holding the game's tangible figures at their start cells.
sim::Simulator make_twin(const engine::GameState& s);

struct ReplayResult {
  engine::GameState state;
  std::string state_hash;
  std::string world_hash;
  Json world;
  std::size_t events = 0;
};

/// Rebuilds game and world state from a JSON-lines log. Motion jobs are
/// re-executed on a fresh twin and checked against the recorded results.
/// Throws CorruptLog naming the offending 1-based line.
ReplayResult replay_log(std::istream& in);
ReplayResult replay_log_file(const std::string& path);

}  // namespace dm::session

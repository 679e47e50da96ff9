// SPDX-License-Identifier: Apache-2.0
#pragma once
// Transport for sessions.
//   POST /session                   body {config?, seed?} -> {session, state}
//   GET  /session/{id}              snapshot
//   POST /session/{id}/scan         ScanRequest -> ScanResponse
//   POST /session/{id}/command      COMMAND payload -> ack (request/response fallback)
//   GET  /session/{id}/events?from=N   WebSocket: STATE_SNAPSHOT, tail after N, then live
// Errors are {code, message} with 400 (schema/parse), 404, 409 (phase/turn), 422, 500.

#include <cstdint>
#include <memory>
#include <string>

#include "dm/session/session.hpp"

namespace dm::session {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks an ephemeral port
  std::string config_path;     // base config; built-in default when empty
  std::string log_dir;         // one JSON-lines log per session when set
  bool pacing = true;
};

int http_status_for(ErrorCode c);

class Server {
 public:
  explicit Server(ServerOptions opts);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts serving on background threads; returns the bound port.
  unsigned short start();
  void stop();
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();

  /// Creates a session as POST /session does.
  Json create_session(const Json& body);
  std::shared_ptr<Session> find(const std::string& id) const;
  /// Queues a command on the session's single writer and waits for it.
  Json submit(const std::string& id, const Json& cmd);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dm::session

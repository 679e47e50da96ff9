// SPDX-License-Identifier: Apache-2.0
#include "dm/session/server.hpp"

#include <sys/socket.h>

#include <atomic>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <condition_variable>
#include <deque>
#include <future>
#include <set>
#include <thread>

namespace dm::session {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

int http_status_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::SchemaError:
    case ErrorCode::ParseFailed:
    case ErrorCode::BadPgm:
    case ErrorCode::InvalidConfig: return 400;
    case ErrorCode::PhaseMismatch:
    case ErrorCode::NotYourTurn:
    case ErrorCode::NotReady:
    case ErrorCode::StalePath: return 409;
    case ErrorCode::Internal:
    case ErrorCode::IoError: return 500;
    default: return 422;
  }
}

namespace {

Json error_body(ErrorCode c, const std::string& msg) { return Json{{"code", to_string(c)}, {"message", msg}}; }

// Single writer per session: commands run one at a time in arrival order.
class CommandQueue {
 public:
  explicit CommandQueue(std::shared_ptr<Session> s) : session_(std::move(s)), worker_([this] { run(); }) {}
  ~CommandQueue() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    worker_.join();
  }
  std::future<Json> push(Json cmd) {
    std::promise<Json> p;
    auto f = p.get_future();
    {
      std::lock_guard lock(mu_);
      q_.emplace_back(std::move(cmd), std::move(p));
    }
    cv_.notify_one();
    return f;
  }

 private:
  void run() {
    for (;;) {
      std::pair<Json, std::promise<Json>> item;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stop_ || !q_.empty(); });
        if (q_.empty()) return;
        item = std::move(q_.front());
        q_.pop_front();
      }
      try {
        item.second.set_value(session_->command(item.first));
      } catch (...) {
        item.second.set_exception(std::current_exception());
      }
    }
  }
  std::shared_ptr<Session> session_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::pair<Json, std::promise<Json>>> q_;
  bool stop_ = false;
  std::thread worker_;
};

struct Hosted {
  std::shared_ptr<Session> session;
  std::unique_ptr<CommandQueue> queue;
};

// Outgoing frames for one connection; seq is renumbered gaplessly here.
class Outbox {
 public:
  void push(MessageType type, std::optional<std::uint64_t> log_seq, const Json& payload) {
    {
      std::lock_guard lock(mu_);
      if (closed_) return;
      Json j{{"type", to_string(type)}, {"seq", ++seq_}};
      j["log_seq"] = log_seq ? Json(*log_seq) : Json(nullptr);
      j["payload"] = payload;
      q_.push_back(j.dump());
    }
    cv_.notify_one();
  }
  std::optional<std::string> pop() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return closed_ || !q_.empty(); });
    if (q_.empty()) return std::nullopt;
    auto s = std::move(q_.front());
    q_.pop_front();
    return s;
  }
  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> q_;
  std::uint64_t seq_ = 0;
  bool closed_ = false;
};

bool broadcastable(const ChannelMessage& m) {
  if (m.type == MessageType::Command) return false;
  return !(m.type == MessageType::Error && m.payload.value("origin", "") == "COMMAND");
}

std::vector<std::string> split_path(std::string_view target, std::string* query) {
  const auto q = target.find('?');
  if (query) *query = q == std::string_view::npos ? "" : std::string(target.substr(q + 1));
  target = target.substr(0, q);
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < target.size()) {
    if (target[i] == '/') {
      ++i;
      continue;
    }
    const auto j = target.find('/', i);
    parts.emplace_back(target.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    if (j == std::string_view::npos) break;
    i = j;
  }
  return parts;
}

std::uint64_t query_from(const std::string& query) {
  std::size_t pos = 0;
  while (pos < query.size()) {
    auto amp = query.find('&', pos);
    if (amp == std::string::npos) amp = query.size();
    const std::string kv = query.substr(pos, amp - pos);
    if (kv.rfind("from=", 0) == 0) {
      try {
        return std::stoull(kv.substr(5));
      } catch (const std::exception&) {
        throw Error(ErrorCode::SchemaError, "from: expected a sequence number");
      }
    }
    pos = amp + 1;
  }
  return 0;
}

}  // namespace

struct Server::Impl {
  ServerOptions opts;
  board::GameConfig base;
  mutable std::mutex mu;
  std::map<std::string, std::shared_ptr<Hosted>> sessions;
  int next_id = 1;

  net::io_context ioc;
  std::unique_ptr<tcp::acceptor> acceptor;
  unsigned short port = 0;
  std::atomic<bool> running{false};
  std::thread accept_thread;
  std::mutex conn_mu;
  std::set<int> fds;
  std::vector<std::thread> conn_threads;
  std::mutex wait_mu;
  std::condition_variable wait_cv;

  std::shared_ptr<Hosted> hosted(const std::string& id) const {
    std::lock_guard lock(mu);
    const auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  Json create(const Json& body) {
    board::GameConfig cfg = base;
    if (body.is_object() && body.contains("config")) cfg = board::config_from_json(body["config"]);
    if (body.is_object() && body.contains("seed")) cfg.seed = require<std::uint64_t>(body, "seed", "");
    cfg.validate();
    std::string id;
    {
      std::lock_guard lock(mu);
      id = "s" + std::to_string(next_id++);
    }
    SessionOptions so;
    so.pacing = opts.pacing;
    if (!opts.log_dir.empty()) so.log_path = opts.log_dir + "/" + id + ".jsonl";
    auto h = std::make_shared<Hosted>();
    h->session = std::make_shared<Session>(id, std::make_shared<const board::GameConfig>(cfg), so);
    h->queue = std::make_unique<CommandQueue>(h->session);
    const Json snap = h->session->snapshot();
    {
      std::lock_guard lock(mu);
      sessions[id] = h;
    }
    return Json{{"session", id},
                {"events", "/session/" + id + "/events"},
                {"scan", "/session/" + id + "/scan"},
                {"command", "/session/" + id + "/command"},
                {"snapshot", snap}};
  }

  Json submit(const std::string& id, const Json& cmd) {
    const auto h = hosted(id);
    if (!h) throw Error(ErrorCode::SchemaError, "unknown session " + id);
    return h->queue->push(cmd).get();
  }

  http::response<http::string_body> route(const http::request<http::string_body>& req) {
    http::response<http::string_body> res;
    res.version(req.version());
    res.keep_alive(req.keep_alive());
    res.set(http::field::content_type, "application/json");
    res.set(http::field::access_control_allow_origin, "*");
    const auto reply = [&](int status, const Json& body) {
      res.result(static_cast<http::status>(status));
      res.body() = body.dump();
      res.prepare_payload();
    };
    try {
      const auto parts = split_path(std::string_view(req.target().data(), req.target().size()), nullptr);
      const auto body = [&] {
        if (req.body().empty()) return Json::object();
        return parse_json(req.body());
      };
      if (parts.size() == 1 && parts[0] == "health" && req.method() == http::verb::get) {
        reply(200, Json{{"ok", true}});
      } else if (parts.size() == 1 && parts[0] == "session" && req.method() == http::verb::post) {
        reply(201, create(body()));
      } else if (parts.size() >= 2 && parts[0] == "session") {
        const auto h = hosted(parts[1]);
        if (!h) {
          reply(404, error_body(ErrorCode::SchemaError, "unknown session " + parts[1]));
        } else if (parts.size() == 2 && req.method() == http::verb::get) {
          reply(200, h->session->snapshot());
        } else if (parts.size() == 3 && parts[2] == "scan" && req.method() == http::verb::post) {
          reply(200, h->session->scan(body()));
        } else if (parts.size() == 3 && parts[2] == "command" && req.method() == http::verb::post) {
          reply(200, h->queue->push(body()).get());
        } else {
          reply(404, error_body(ErrorCode::SchemaError, "no route"));
        }
      } else {
        reply(404, error_body(ErrorCode::SchemaError, "no route"));
      }
    } catch (const Error& e) {
      reply(http_status_for(e.code()), error_body(e.code(), e.what()));
    } catch (const nlohmann::json::exception& e) {
      reply(400, error_body(ErrorCode::SchemaError, e.what()));
    } catch (const std::exception& e) {
      reply(500, error_body(ErrorCode::Internal, e.what()));
    }
    return res;
  }

  void serve_events(tcp::socket sock, const http::request<http::string_body>& req, const std::string& id,
                    std::uint64_t from) {
    websocket::stream<tcp::socket> ws(std::move(sock));
    const auto h = hosted(id);
    if (!h) {
      http::response<http::string_body> res{http::status::not_found, req.version()};
      res.body() = error_body(ErrorCode::SchemaError, "unknown session " + id).dump();
      res.prepare_payload();
      http::write(ws.next_layer(), res);
      return;
    }
    ws.accept(req);
    ws.text(true);
    Outbox out;
    auto att = h->session->attach(from, [&out](const ChannelMessage& m) {
      if (broadcastable(m)) out.push(m.type, m.seq, m.payload);
    });
    out.push(MessageType::StateSnapshot, att.snapshot.at("last_seq").get<std::uint64_t>(), att.snapshot);
    for (const auto& m : att.tail) {
      if (broadcastable(m)) out.push(m.type, m.seq, m.payload);
    }
    std::thread writer([&] {
      try {
        while (auto s = out.pop()) ws.write(net::buffer(*s));
      } catch (const std::exception&) {
      }
    });
    try {
      for (;;) {
        beast::flat_buffer buf;
        ws.read(buf);
        Json msg;
        try {
          msg = parse_json(beast::buffers_to_string(buf.data()));
          if (!msg.is_object() || msg.value("type", "") != "COMMAND" || !msg.contains("payload")) {
            throw Error(ErrorCode::SchemaError, "/type: clients may only send COMMAND messages");
          }
        } catch (const Error& e) {
          out.push(MessageType::Error, std::nullopt, error_body(e.code(), e.what()));
          continue;
        }
        Json payload = msg["payload"];
        try {
          h->queue->push(payload).get();
        } catch (const Error& e) {
          Json err = error_body(e.code(), e.what());
          if (payload.is_object() && payload.contains("id")) err["command_id"] = payload["id"];
          out.push(MessageType::Error, std::nullopt, err);
        } catch (const std::exception& e) {
          out.push(MessageType::Error, std::nullopt, error_body(ErrorCode::Internal, e.what()));
        }
      }
    } catch (const std::exception&) {
    }
    h->session->unsubscribe(att.token);
    out.close();
    writer.join();
    beast::error_code ec;
    ws.next_layer().shutdown(tcp::socket::shutdown_both, ec);
  }

  void serve(tcp::socket sock) {
    const int fd = sock.native_handle();
    {
      std::lock_guard lock(conn_mu);
      fds.insert(fd);
    }
    try {
      beast::flat_buffer buf;
      for (;;) {
        http::request<http::string_body> req;
        http::read(sock, buf, req);
        if (websocket::is_upgrade(req)) {
          std::string query;
          const auto parts = split_path(std::string_view(req.target().data(), req.target().size()), &query);
          if (parts.size() == 3 && parts[0] == "session" && parts[2] == "events") {
            serve_events(std::move(sock), req, parts[1], query_from(query));
          }
          break;
        }
        auto res = route(req);
        http::write(sock, res);
        if (!res.keep_alive()) break;
      }
    } catch (const std::exception&) {
    }
    {
      std::lock_guard lock(conn_mu);
      fds.erase(fd);
    }
    beast::error_code ec;
    sock.shutdown(tcp::socket::shutdown_both, ec);
  }

  void accept_loop() {
    while (running) {
      tcp::socket sock(ioc);
      beast::error_code ec;
      acceptor->accept(sock, ec);
      if (!running) break;
      if (ec) continue;
      std::lock_guard lock(conn_mu);
      conn_threads.emplace_back([this, s = std::move(sock)]() mutable { serve(std::move(s)); });
    }
  }
};

Server::Server(ServerOptions opts) : impl_(std::make_unique<Impl>()) {
  impl_->opts = std::move(opts);
  impl_->base = impl_->opts.config_path.empty() ? board::default_config() : board::load_config(impl_->opts.config_path);
}

Server::~Server() { stop(); }

unsigned short Server::start() {
  auto& I = *impl_;
  const auto addr = net::ip::make_address(I.opts.address);
  I.acceptor = std::make_unique<tcp::acceptor>(I.ioc, tcp::endpoint(addr, I.opts.port));
  I.port = I.acceptor->local_endpoint().port();
  I.running = true;
  I.accept_thread = std::thread([&I] { I.accept_loop(); });
  return I.port;
}

void Server::stop() {
  auto& I = *impl_;
  if (!I.running.exchange(false)) return;
  {
    // Wake the blocking accept.
    beast::error_code ec;
    tcp::socket poke(I.ioc);
    poke.connect(tcp::endpoint(net::ip::make_address(I.opts.address == "0.0.0.0" ? "127.0.0.1" : I.opts.address), I.port), ec);
  }
  I.accept_thread.join();
  {
    std::lock_guard lock(I.conn_mu);
    for (const int fd : I.fds) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& t : I.conn_threads) t.join();
  I.conn_threads.clear();
  beast::error_code ec;
  I.acceptor->close(ec);
  I.wait_cv.notify_all();
}

void Server::wait() {
  std::unique_lock lock(impl_->wait_mu);
  impl_->wait_cv.wait(lock, [&] { return !impl_->running; });
}

Json Server::create_session(const Json& body) { return impl_->create(body); }

std::shared_ptr<Session> Server::find(const std::string& id) const {
  const auto h = impl_->hosted(id);
  return h ? h->session : nullptr;
}

Json Server::submit(const std::string& id, const Json& cmd) { return impl_->submit(id, cmd); }

}  // namespace dm::session

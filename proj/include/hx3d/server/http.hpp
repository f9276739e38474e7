#pragma once

#include <sys/socket.h>

#include <atomic>
#include <memory>
#include <string>

#include <httplib.h>

#include "hx3d/server/engine.hpp"

namespace hx3d::server {

inline constexpr const char* kX3dMediaType = "model/x3d+xml";
inline constexpr const char* kJsonMediaType = "application/json";
inline constexpr const char* kStreamMediaType = "application/x-ndjson";

// Small kernel send buffer so a slow stream reader backs up into the
// latest-only channel instead of a socket backlog.
inline constexpr int kStreamSendBuffer = 16 * 1024;

inline json error_body(std::string_view code, std::string_view message) {
  return {{"ok", false}, {"error", code}, {"message", message}};
}

// HTTP front end. Handlers never touch SimState: they read the latest
// snapshot and queue commands.
class HttpServer {
 public:
  explicit HttpServer(Engine& engine) : engine_(engine) {
    svr_.set_socket_options([](socket_t sock) {
      httplib::default_socket_options(sock);
      const int buf = kStreamSendBuffer;
      setsockopt(sock, SOL_SOCKET, SO_SNDBUF, &buf, sizeof buf);
    });
    routes();
  }

  ~HttpServer() { stop(); }

  bool bind(const std::string& host, int port) { return svr_.bind_to_port(host, port); }
  int bind_any(const std::string& host = "127.0.0.1") { return svr_.bind_to_any_port(host); }

  // Blocks until stop().
  bool serve() { return svr_.listen_after_bind(); }

  void stop() {
    closing_ = true;
    svr_.stop();
  }

  bool is_running() const { return svr_.is_running(); }
  void wait_until_ready() const { svr_.wait_until_ready(); }

 private:
  static void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJsonMediaType);
  }

  void routes() {
    svr_.Get("/api/attachments", [this](const httplib::Request&, httplib::Response& res) {
      const auto& dir = engine_.settings().attachments_dir;
      if (dir.empty()) return send_json(res, 500, error_body("DirectoryUnreadable", "no attachment directory configured"));
      try {
        send_json(res, 200, linac::list_attachments(dir));
      } catch (const linac::LinacError& e) {
        send_json(res, 500, error_body(linac::to_string(e.code()), e.what()));
      }
    });

    svr_.Get(R"(/api/scene/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const SnapshotPtr snap = engine_.latest();
      auto it = snap->scenes.find(req.matches[1].str());
      if (it == snap->scenes.end()) return send_json(res, 404, error_body("NotFound", "no scene '" + req.matches[1].str() + "'"));
      res.set_content(x3d::serialize_x3d(*it->second), kX3dMediaType);
    });

    svr_.Post("/api/command", [this](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error& e) {
        return send_json(res, 400, error_body("ValidationFailed", std::string("body is not JSON: ") + e.what()));
      }
      try {
        const Ack ack = engine_.submit(body);
        send_json(res, 200, {{"ok", true}, {"seq", ack.seq}, {"apply_tick", ack.apply_tick}, {"target", ack.target}});
      } catch (const CommandError& e) {
        send_json(res, 400, error_body(to_string(e.code()), e.what()));
      }
    });

    svr_.Get("/api/state", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(engine_.latest()->text, kJsonMediaType);
    });

    // One JSON snapshot per line. ?max=N closes the stream after N lines.
    svr_.Get("/ws/state", [this](const httplib::Request& req, httplib::Response& res) {
      long max = 0;
      if (req.has_param("max")) {
        try {
          max = std::stol(req.get_param_value("max"));
        } catch (const std::exception&) {
          return send_json(res, 400, error_body("ValidationFailed", "max must be an integer"));
        }
      }
      struct Cursor {
        std::int64_t last = -1;
        long sent = 0;
      };
      auto cur = std::make_shared<Cursor>();
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(kStreamMediaType, [this, cur, max](std::size_t, httplib::DataSink& sink) {
        if (closing_) {
          sink.done();
          return true;
        }
        const SnapshotPtr snap = engine_.wait_newer(cur->last, std::chrono::milliseconds(200));
        if (!snap) return !closing_;
        const std::string line = snap->text + "\n";
        if (!sink.write(line.data(), line.size())) return false;
        cur->last = snap->tick;
        if (max > 0 && ++cur->sent >= max) sink.done();
        return true;
      });
    });
  }

  Engine& engine_;
  httplib::Server svr_;
  std::atomic<bool> closing_{false};
};

}  // namespace hx3d::server

#pragma once

#include "hreye/player.hpp"

#include <memory>
#include <optional>
#include <string>

namespace hreye {

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

// JSON request handling for the operator API, independent of the transport:
//
//   GET  /api/state     mode, fps, drop counters, per-eye 40 x RGBA snapshot
//   POST /api/mode      {type, id?, angle?, level?, color?, intensity?}
//   POST /api/sequence  {ids, dwell_ms, randomize, seed} -> {order}
//   GET  /api/catalog   luceme ids and glosses
//
// Errors carry {"error": {"code", "message"}} with a 4xx status.
class ApiHandlers {
public:
    explicit ApiHandlers(Controller& controller) : controller_(&controller) {}

    ApiResponse handle(const std::string& method, const std::string& path, const std::string& body) const;

    ApiResponse get_state() const;
    ApiResponse post_mode(const std::string& body) const;
    ApiResponse post_sequence(const std::string& body) const;
    ApiResponse get_catalog() const;

    /// One /api/frames event payload.
    static std::string frame_event_json(const FrameEvent& event);

private:
    Controller* controller_;
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::optional<std::string> static_dir;
};

// HTTP front end; /api/frames streams every emitted frame as server-sent
// events.
class ApiServer {
public:
    ApiServer(Controller& controller, ServerOptions options);
    ~ApiServer();

    /// Binds the socket; returns the bound port. Throws TransportError.
    int bind();
    /// Serves until stop(); call after bind().
    void serve();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hreye

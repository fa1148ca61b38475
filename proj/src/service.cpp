#include "hreye/service.hpp"

#include "hreye/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <filesystem>

namespace hreye {

using nlohmann::json;

namespace {

ApiResponse json_response(int status, const json& body) {
    return {status, body.dump()};
}

ApiResponse error_response(int status, std::string_view code, const std::string& message) {
    return json_response(status, {{"error", {{"code", code}, {"message", message}}}});
}

json pixels_json(const LedFrame& frame) {
    json out = json::array();
    for (const auto& p : frame) {
        out.push_back({p.r, p.g, p.b, p.a});
    }
    return out;
}

json mode_json(const ControllerMode& mode) {
    json out = std::visit(
        [](const auto& m) -> json {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, IdleMode>) {
                return {{"type", "idle"}};
            } else if constexpr (std::is_same_v<M, ActiveMode>) {
                json j{{"type", "active"}, {"id", to_string(m.id)}};
                if (m.id == ActiveLucemeId::BatteryLevel) j["level"] = m.level;
                return j;
            } else if constexpr (std::is_same_v<M, OcularMode>) {
                json j{{"type", "ocular"}, {"id", to_string(m.id)}};
                if (m.id.kind == OcularKind::Gaze) j["angle"] = m.id.angle.degrees();
                return j;
            } else {
                return {{"type", "functional"},
                        {"color", {m.color.r, m.color.g, m.color.b, m.color.a}},
                        {"intensity", m.intensity}};
            }
        },
        mode);
    out["description"] = describe(mode);
    return out;
}

json state_json(const ControllerState& s) {
    json eyes = json::array();
    for (const auto& e : s.eyes) {
        eyes.push_back({{"eye_id", e.eye_id},
                        {"last_sequence", e.last_sequence ? json(*e.last_sequence) : json(nullptr)},
                        {"calibration_offset_deg", e.calibration_offset_deg},
                        {"updated_at_ms", e.updated_at_ms},
                        {"pixels", pixels_json(e.frame)}});
    }
    return {{"mode", mode_json(s.mode)},
            {"fps", s.fps},
            {"frame_index", s.frame_index},
            {"timestamp_ms", s.timestamp_ms},
            {"device_connected", s.device_connected},
            {"drops",
             {{"messages", s.dropped_messages}, {"stream_frames", s.dropped_stream_frames}, {"stale", s.rejected_stale}}},
            {"sequence", {{"order", s.sequence.order}, {"position", s.sequence.position}, {"active", s.sequence.active}}},
            {"eyes", eyes}};
}

// Thrown while decoding a request body; maps to a 4xx response.
struct RequestError {
    int status;
    std::string code;
    std::string message;
};

RequestError bad_request(const std::string& message) {
    return {400, "bad_request", message};
}

ColorRGBA parse_color(const json& j) {
    if (j.is_string()) {
        const auto c = parse_palette_color(j.get<std::string>());
        if (!c) throw bad_request("unknown palette color '" + j.get<std::string>() + "'");
        return Palette::defaults()(*c);
    }
    if (j.is_array() && (j.size() == 3 || j.size() == 4)) {
        std::array<int, 4> ch{0, 0, 0, 255};
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (!j[i].is_number_integer() || j[i].get<int>() < 0 || j[i].get<int>() > 255) {
                throw bad_request("color channels must be integers in [0, 255]");
            }
            ch[i] = j[i].get<int>();
        }
        return {static_cast<std::uint8_t>(ch[0]), static_cast<std::uint8_t>(ch[1]), static_cast<std::uint8_t>(ch[2]),
                static_cast<std::uint8_t>(ch[3])};
    }
    throw bad_request("color must be a palette name or an [r,g,b(,a)] array");
}

const json& require(const json& body, const char* key) {
    if (!body.contains(key)) throw bad_request(std::string("missing field '") + key + "'");
    return body.at(key);
}

LucemeId parse_id_or_404(const std::string& name) {
    if (auto id = parse_luceme_id(name)) return *id;
    throw RequestError{404, "not_found", "unknown luceme '" + name + "'"};
}

ControllerMode parse_mode(const json& body) {
    if (!body.is_object()) throw bad_request("body must be a JSON object");
    const auto& type_j = require(body, "type");
    if (!type_j.is_string()) throw bad_request("'type' must be a string");
    const auto type = type_j.get<std::string>();

    if (type == "idle") {
        return IdleMode{};
    }
    if (type == "active") {
        const auto& id_j = require(body, "id");
        if (!id_j.is_string()) throw bad_request("'id' must be a string");
        const auto id = parse_active_luceme(id_j.get<std::string>());
        if (!id) throw RequestError{404, "not_found", "unknown active luceme '" + id_j.get<std::string>() + "'"};
        ActiveMode m{*id, kDefaultBatteryLevel};
        if (body.contains("level")) {
            if (!body["level"].is_number()) throw bad_request("'level' must be a number");
            m.level = body["level"].get<double>();
        }
        return m;
    }
    if (type == "ocular") {
        if (body.contains("angle")) {
            const auto& a = body["angle"];
            if (!a.is_number_integer()) throw bad_request("'angle' must be an integer multiple of 30");
            try {
                return OcularMode{OcularLucemeId::gaze(GazeAngle::from_degrees(a.get<int>()))};
            } catch (const DomainError& e) {
                throw bad_request(e.what());
            }
        }
        const auto& id_j = require(body, "id");
        if (!id_j.is_string()) throw bad_request("'id' must be a string");
        auto name = id_j.get<std::string>();
        if (!name.starts_with("Ocular-")) name = "Ocular-" + name;
        const auto id = parse_id_or_404(name);
        return OcularMode{std::get<OcularLucemeId>(id)};
    }
    if (type == "functional") {
        FunctionalMode m{Palette::defaults()(PaletteColor::ScleraWhite), 1.0};
        if (body.contains("color")) m.color = parse_color(body["color"]);
        if (body.contains("intensity")) {
            if (!body["intensity"].is_number()) throw bad_request("'intensity' must be a number");
            m.intensity = body["intensity"].get<double>();
        }
        return m;
    }
    throw bad_request("unknown mode type '" + type + "'");
}

template <typename Fn>
ApiResponse guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const RequestError& e) {
        return error_response(e.status, e.code, e.message);
    } catch (const json::exception& e) {
        return error_response(400, "bad_request", std::string("malformed JSON: ") + e.what());
    } catch (const NotFoundError& e) {
        return error_response(404, "not_found", e.what());
    } catch (const DomainError& e) {
        return error_response(400, "invalid_parameter", e.what());
    } catch (const TransportError& e) {
        return error_response(503, "no_device", e.what());
    } catch (const Error& e) {
        return error_response(500, "internal", e.what());
    }
}

}  // namespace

ApiResponse ApiHandlers::get_state() const {
    return json_response(200, state_json(controller_->state()));
}

ApiResponse ApiHandlers::post_mode(const std::string& body) const {
    return guarded([&] {
        const auto mode = parse_mode(json::parse(body));
        return json_response(200, state_json(controller_->set_mode(mode)));
    });
}

ApiResponse ApiHandlers::post_sequence(const std::string& body) const {
    return guarded([&] {
        const auto j = json::parse(body);
        if (!j.is_object()) throw bad_request("body must be a JSON object");
        const auto& ids_j = require(j, "ids");
        if (!ids_j.is_array() || ids_j.empty()) throw bad_request("'ids' must be a non-empty array");
        std::vector<LucemeId> ids;
        for (const auto& v : ids_j) {
            if (!v.is_string()) throw bad_request("'ids' entries must be strings");
            ids.push_back(parse_id_or_404(v.get<std::string>()));
        }
        const auto& dwell = require(j, "dwell_ms");
        if (!dwell.is_number_integer() || dwell.get<std::int64_t>() <= 0) {
            throw bad_request("'dwell_ms' must be a positive integer");
        }
        const bool randomize = j.value("randomize", false);
        std::uint64_t seed = 0;
        if (j.contains("seed")) {
            if (!j["seed"].is_number_integer()) throw bad_request("'seed' must be an integer");
            seed = j["seed"].get<std::uint64_t>();
        }
        const auto order = controller_->play_sequence(ids, dwell.get<std::int64_t>(), randomize, seed);
        return json_response(200, {{"order", order}, {"dwell_ms", dwell}, {"seed", seed}, {"randomize", randomize}});
    });
}

ApiResponse ApiHandlers::get_catalog() const {
    json active = json::array();
    for (auto id : kAllActiveLucemes) {
        active.push_back({{"id", to_string(id)}, {"gloss", gloss(id)}});
    }
    json ocular_list = json::array();
    for (auto kind : {OcularKind::Steady, OcularKind::Blink, OcularKind::Squint, OcularKind::EyesWide}) {
        const OcularLucemeId id{kind, {}};
        ocular_list.push_back({{"id", to_string(id)}, {"gloss", gloss(id)}});
    }
    for (auto a : GazeAngle::all()) {
        const auto id = OcularLucemeId::gaze(a);
        ocular_list.push_back({{"id", to_string(id)}, {"gloss", gloss(id)}, {"angle", a.degrees()}});
    }
    return json_response(200, {{"active", active}, {"ocular", ocular_list}});
}

ApiResponse ApiHandlers::handle(const std::string& method, const std::string& path, const std::string& body) const {
    if (path == "/api/state" && method == "GET") return get_state();
    if (path == "/api/mode" && method == "POST") return post_mode(body);
    if (path == "/api/sequence" && method == "POST") return post_sequence(body);
    if (path == "/api/catalog" && method == "GET") return get_catalog();
    if (path == "/api/state" || path == "/api/mode" || path == "/api/sequence" || path == "/api/catalog") {
        return error_response(405, "method_not_allowed", method + " not supported on " + path);
    }
    return error_response(404, "not_found", "no endpoint " + path);
}

std::string ApiHandlers::frame_event_json(const FrameEvent& e) {
    return json{{"eye_id", e.eye_id},
                {"sequence", e.sequence},
                {"timestamp_ms", e.timestamp_ms},
                {"pixels", pixels_json(e.frame)}}
        .dump();
}

struct ApiServer::Impl {
    Controller* controller;
    ServerOptions options;
    ApiHandlers handlers;
    httplib::Server server;

    Impl(Controller& c, ServerOptions o) : controller(&c), options(std::move(o)), handlers(c) {}
};

namespace {

constexpr std::string_view kPlaceholderPage = R"(<!doctype html>
<html><head><title>HREye</title></head><body>
<h1>HREye controller</h1>
<p>The operator console is not installed. Start the server with
<code>--static-dir</code> pointing at a console build, or use the API:
<code>/api/state</code>, <code>/api/mode</code>, <code>/api/sequence</code>,
<code>/api/catalog</code>, <code>/api/frames</code>.</p>
</body></html>
)";

void send(httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type.c_str());
}

}  // namespace

ApiServer::ApiServer(Controller& controller, ServerOptions options)
    : impl_(std::make_unique<Impl>(controller, std::move(options))) {
    auto& svr = impl_->server;
    auto* impl = impl_.get();

    svr.Get("/api/state", [impl](const httplib::Request&, httplib::Response& res) {
        send(res, impl->handlers.get_state());
    });
    svr.Post("/api/mode", [impl](const httplib::Request& req, httplib::Response& res) {
        send(res, impl->handlers.post_mode(req.body));
    });
    svr.Post("/api/sequence", [impl](const httplib::Request& req, httplib::Response& res) {
        send(res, impl->handlers.post_sequence(req.body));
    });
    svr.Get("/api/catalog", [impl](const httplib::Request&, httplib::Response& res) {
        send(res, impl->handlers.get_catalog());
    });
    svr.Get("/api/frames", [impl](const httplib::Request&, httplib::Response& res) {
        auto sub = impl->controller->subscribe();
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider(
            "text/event-stream",
            [sub](std::size_t, httplib::DataSink& sink) {
                while (auto event = sub->pop(std::chrono::milliseconds(250))) {
                    const auto msg = "data: " + ApiHandlers::frame_event_json(*event) + "\n\n";
                    if (!sink.write(msg.data(), msg.size())) return false;
                }
                if (sub->closed()) {
                    sink.done();
                    return true;
                }
                // Keep-alive comment so dead clients are detected.
                static constexpr std::string_view ping = ": ping\n\n";
                return sink.write(ping.data(), ping.size());
            },
            [sub](bool) { sub->close(); });
    });

    // Anything else under /api gets the handlers' JSON 404/405 errors.
    const auto fallback = [impl](const httplib::Request& req, httplib::Response& res) {
        send(res, impl->handlers.handle(req.method, req.path, req.body));
    };
    svr.Get(R"(/api/.*)", fallback);
    svr.Post(R"(/api/.*)", fallback);
    svr.Put(R"(/api/.*)", fallback);
    svr.Delete(R"(/api/.*)", fallback);

    if (impl_->options.static_dir && std::filesystem::is_directory(*impl_->options.static_dir)) {
        svr.set_mount_point("/", *impl_->options.static_dir);
    } else {
        svr.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(std::string(kPlaceholderPage), "text/html");
        });
    }
}

ApiServer::~ApiServer() {
    stop();
}

int ApiServer::bind() {
    auto& svr = impl_->server;
    const auto& o = impl_->options;
    int port = o.port;
    if (port == 0) {
        port = svr.bind_to_any_port(o.host);
    } else if (!svr.bind_to_port(o.host, port)) {
        port = -1;
    }
    if (port < 0) {
        throw TransportError("cannot listen on " + o.host + ":" + std::to_string(o.port));
    }
    return port;
}

void ApiServer::serve() {
    impl_->server.listen_after_bind();
}

void ApiServer::stop() {
    impl_->server.stop();
}

}  // namespace hreye

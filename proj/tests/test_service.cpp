#include "hreye/service.hpp"
#include "support.hpp"

#include <httplib.h>
#include <json.hpp>

#include <set>
#include <thread>

using namespace hreye;
using nlohmann::json;

namespace {

json body_of(const ApiResponse& r) {
    return json::parse(r.body);
}

}  // namespace

TEST_CASE("state reports mode, fps, drops and eyes") {
    Controller c;
    ApiHandlers api(c);
    c.step();
    const auto r = api.get_state();
    CHECK(r.status == 200);
    const auto j = body_of(r);
    CHECK(j["mode"]["type"] == "idle");
    CHECK(j["fps"] == 30);
    CHECK(j["frame_index"] == 1);
    CHECK(j["device_connected"] == true);
    CHECK(j["drops"]["messages"] == 0);
    REQUIRE(j["eyes"].size() == 2);
    CHECK(j["eyes"][0]["pixels"].size() == 40);
    CHECK(j["eyes"][0]["pixels"][0].size() == 4);
    CHECK(j["eyes"][1]["last_sequence"] == 0);
}

TEST_CASE("ocular mode echo") {
    Controller c;
    ApiHandlers api(c);
    const auto r = api.post_mode(R"({"type":"ocular","angle":120})");
    CHECK(r.status == 200);
    const auto j = body_of(api.get_state());
    CHECK(j["mode"]["type"] == "ocular");
    CHECK(j["mode"]["id"] == "Ocular-120");
    c.step();
    CHECK(std::get<OcularMode>(c.state().mode).id == OcularLucemeId::gaze(GazeAngle::from_degrees(120)));
}

TEST_CASE("mode requests") {
    Controller c;
    ApiHandlers api(c);
    CHECK(api.post_mode(R"({"type":"active","id":"BatteryLevel","level":0.25})").status == 200);
    CHECK(std::get<ActiveMode>(c.state().mode).level == 0.25);
    CHECK(api.post_mode(R"({"type":"ocular","id":"Ocular-Blink"})").status == 200);
    CHECK(api.post_mode(R"({"type":"functional","color":"Problem-Red","intensity":0.5})").status == 200);
    c.step();
    CHECK(c.state().eyes[0].frame[0] == ColorRGBA{255, 0, 0, 128});
    CHECK(api.post_mode(R"({"type":"functional","color":[10,20,30],"intensity":1})").status == 200);
    c.step();
    CHECK(c.state().eyes[0].frame[0] == ColorRGBA{10, 20, 30, 255});
    CHECK(api.post_mode(R"({"type":"functional"})").status == 200);
    c.step();
    CHECK(c.state().eyes[0].frame[5] == Palette::defaults()(PaletteColor::ScleraWhite));
    CHECK(api.post_mode(R"({"type":"idle"})").status == 200);
    c.step();
    CHECK(c.state().eyes[0].frame == blank_frame());
}

TEST_CASE("mode request errors") {
    Controller c;
    ApiHandlers api(c);
    auto code = [&](const std::string& body) { return api.post_mode(body).status; };
    CHECK(code("{not json") == 400);
    CHECK(code("[]") == 400);
    CHECK(code(R"({"type":"dance"})") == 400);
    CHECK(code(R"({"type":"active"})") == 400);
    CHECK(code(R"({"type":"active","id":"Dance"})") == 404);
    CHECK(code(R"({"type":"active","id":"BatteryLevel","level":2})") == 400);
    CHECK(code(R"({"type":"ocular","angle":45})") == 400);
    CHECK(code(R"({"type":"functional","color":"magenta"})") == 400);
    CHECK(code(R"({"type":"functional","color":[300,0,0]})") == 400);
    CHECK(code(R"({"type":"functional","intensity":3})") == 400);
    const auto j = body_of(api.post_mode(R"({"type":"active","id":"Dance"})"));
    CHECK(j["error"]["code"].is_string());
    CHECK(j["error"]["message"].is_string());
    CHECK(std::holds_alternative<IdleMode>(c.state().mode));
}

TEST_CASE("disconnected device is a 503") {
    ControllerOptions opts;
    opts.connect_device = false;
    Controller c(opts);
    ApiHandlers api(c);
    CHECK(api.post_mode(R"({"type":"active","id":"Stay"})").status == 503);
    CHECK(std::holds_alternative<ActiveMode>(c.state().mode));
}

TEST_CASE("sequence requests") {
    Controller c;
    ApiHandlers api(c);
    json ids = json::array();
    for (auto id : kAllActiveLucemes) ids.push_back(std::string(to_string(id)));
    const json req{{"ids", ids}, {"dwell_ms", 500}, {"randomize", true}, {"seed", 7}};
    const auto a = body_of(api.post_sequence(req.dump()));
    const auto b = body_of(api.post_sequence(req.dump()));
    CHECK(a["order"] == b["order"]);
    std::set<std::string> names;
    for (const auto& n : a["order"]) names.insert(n.get<std::string>());
    CHECK(names.size() == 16);
    CHECK(body_of(api.get_state())["sequence"]["active"] == true);

    CHECK(api.post_sequence(R"({"ids":[],"dwell_ms":5})").status == 400);
    CHECK(api.post_sequence(R"({"ids":["Stay"],"dwell_ms":0})").status == 400);
    CHECK(api.post_sequence(R"({"ids":["Dance"],"dwell_ms":10})").status == 404);
    CHECK(api.post_sequence(R"({"ids":["Stay","Ocular-90"],"dwell_ms":10})").status == 200);
}

TEST_CASE("catalog listing") {
    Controller c;
    ApiHandlers api(c);
    const auto j = body_of(api.get_catalog());
    CHECK(j["active"].size() == 16);
    CHECK(j["ocular"].size() == 16);
    CHECK(j["active"][0]["gloss"].is_string());
}

TEST_CASE("routing") {
    Controller c;
    ApiHandlers api(c);
    CHECK(api.handle("GET", "/api/state", "").status == 200);
    CHECK(api.handle("POST", "/api/state", "").status == 405);
    CHECK(api.handle("GET", "/api/mode", "").status == 405);
    CHECK(api.handle("GET", "/api/nothing", "").status == 404);
}

TEST_CASE("frame event payload") {
    FrameEvent e{1, 7, 233, render_gaze(GazeAngle::from_degrees(90), 1000)};
    const auto j = json::parse(ApiHandlers::frame_event_json(e));
    CHECK(j["eye_id"] == 1);
    CHECK(j["sequence"] == 7);
    CHECK(j["timestamp_ms"] == 233);
    CHECK(j["pixels"].size() == 40);
    CHECK(j["pixels"][28] == json::array({255, 60, 160, 255}));
}

TEST_CASE("http loopback") {
    Controller c(ControllerOptions{PlayerConfig{60}});
    ServerOptions opts;
    opts.port = 0;
    ApiServer server(c, opts);
    const int port = server.bind();
    REQUIRE(port > 0);
    c.start();
    std::thread t([&] { server.serve(); });

    httplib::Client cli("127.0.0.1", port);
    cli.set_read_timeout(5, 0);
    auto res = cli.Post("/api/mode", R"({"type":"active","id":"FollowYou"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    res = cli.Get("/api/state");
    REQUIRE(res);
    CHECK(json::parse(res->body)["mode"]["id"] == "FollowYou");
    res = cli.Get("/api/catalog");
    REQUIRE(res);
    CHECK(res->status == 200);
    res = cli.Get("/");
    REQUIRE(res);
    CHECK(res->status == 200);
    res = cli.Get("/api/unknown");
    REQUIRE(res);
    CHECK(res->status == 404);
    CHECK(json::parse(res->body)["error"]["code"] == "not_found");
    res = cli.Delete("/api/state");
    REQUIRE(res);
    CHECK(res->status == 405);

    // Read a few server-sent frame events, then hang up.
    std::string stream;
    httplib::Client sse("127.0.0.1", port);
    sse.set_read_timeout(5, 0);
    sse.Get("/api/frames", [&](const char* data, std::size_t len) {
        stream.append(data, len);
        return stream.find("data: ", stream.find("data: ") + 1) == std::string::npos;
    });
    const auto start = stream.find("data: ");
    REQUIRE(start != std::string::npos);
    const auto end = stream.find("\n\n", start);
    REQUIRE(end != std::string::npos);
    const auto event = json::parse(stream.substr(start + 6, end - start - 6));
    CHECK(event["pixels"].size() == 40);
    CHECK(event.contains("sequence"));

    server.stop();
    t.join();
    c.stop();
}

TEST_CASE("static assets are served when present") {
    test::TempDir dir("static");
    test::spit(dir.path() / "index.html", "<p>console</p>");
    Controller c;
    ServerOptions opts;
    opts.port = 0;
    opts.static_dir = dir.path().string();
    ApiServer server(c, opts);
    const int port = server.bind();
    std::thread t([&] { server.serve(); });
    httplib::Client cli("127.0.0.1", port);
    auto res = cli.Get("/");
    REQUIRE(res);
    CHECK(res->body == "<p>console</p>");
    res = cli.Get("/api/state");
    REQUIRE(res);
    CHECK(res->status == 200);
    server.stop();
    t.join();
}

#include "cli.hpp"

#include "hreye/driver_sim.hpp"
#include "hreye/error.hpp"
#include "hreye/lucemes.hpp"
#include "hreye/metrics.hpp"
#include "hreye/player.hpp"
#include "hreye/protocol.hpp"
#include "hreye/service.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>
#include <thread>

namespace hreye::cli {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) {
    g_interrupted = true;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Bytes read_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot read " + path);
    return Bytes{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const Bytes& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + path.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::string numbered(int index) {
    std::ostringstream s;
    s << "frame_" << std::setw(5) << std::setfill('0') << index << ".ppm";
    return s.str();
}

struct Common {
    std::string catalog_dir;
    std::string palette_file;

    std::unique_ptr<LucemeCatalog> catalog_storage;

    const LucemeCatalog& catalog() {
        if (catalog_dir.empty()) return LucemeCatalog::builtin();
        if (!catalog_storage) catalog_storage = std::make_unique<LucemeCatalog>(LucemeCatalog::with_overrides(catalog_dir));
        return *catalog_storage;
    }

    Palette palette() const {
        return palette_file.empty() ? Palette::defaults() : Palette::load(palette_file);
    }
};

struct LucemeChoice {
    std::string id;
    std::optional<double> gaze;
    double level = kDefaultBatteryLevel;
    int fps = kDefaultFps;
    int repeats = 1;

    ControllerMode mode() const {
        if (gaze) {
            if (id != "Gaze" && id != "Ocular-Gaze") {
                throw DomainError("--gaze applies to the 'Gaze' luceme only");
            }
            return OcularMode{OcularLucemeId::gaze(quantize_gaze(*gaze))};
        }
        const auto parsed = parse_luceme_id(id);
        if (!parsed) throw NotFoundError("unknown luceme '" + id + "'");
        auto m = mode_for(*parsed);
        if (auto* a = std::get_if<ActiveMode>(&m)) a->level = level;
        validate(m);
        return m;
    }

    LucemeDef definition(const LucemeCatalog& catalog) const {
        const auto m = mode();
        if (const auto* a = std::get_if<ActiveMode>(&m)) return catalog.active(a->id, a->level);
        return ocular(std::get<OcularMode>(m).id);
    }
};

void add_luceme_options(CLI::App* sub, LucemeChoice& c) {
    sub->add_option("luceme-id", c.id, "Active luceme name, Ocular-<kind|deg>, or Gaze with --gaze")->required();
    sub->add_option("--gaze", c.gaze, "Gaze direction in degrees (quantized to 30)");
    sub->add_option("--level", c.level, "Battery level in [0, 1] for BatteryLevel");
    sub->add_option("--fps", c.fps, "Frame rate")->check(CLI::Range(kMinFps, kMaxFps));
    sub->add_option("--repeats", c.repeats, "Number of luceme periods")->check(CLI::PositiveNumber);
}

int cmd_list(Common& common, std::ostream& out) {
    const auto& cat = common.catalog();
    out << "Active lucemes:\n";
    for (auto id : kAllActiveLucemes) {
        const auto& def = cat.raw(id);
        out << "  " << std::left << std::setw(14) << to_string(id) << std::setw(8)
            << (std::to_string(def.duration_ms) + "ms") << gloss(id) << "\n";
    }
    out << "Ocular lucemes:\n";
    for (auto kind : {OcularKind::Steady, OcularKind::Blink, OcularKind::Squint, OcularKind::EyesWide}) {
        const OcularLucemeId id{kind, {}};
        out << "  " << std::left << std::setw(22) << to_string(id) << gloss(id) << "\n";
    }
    for (auto a : GazeAngle::all()) {
        const auto id = OcularLucemeId::gaze(a);
        out << "  " << std::left << std::setw(22) << to_string(id) << gloss(id) << "\n";
    }
    return 0;
}

int cmd_play(Common& common, const LucemeChoice& choice, const std::string& log_path, std::ostream& out) {
    const auto& cat = common.catalog();
    const auto mode = choice.mode();
    const auto frames = stream_length(choice.definition(cat), choice.fps, choice.repeats);

    ControllerOptions opts;
    opts.player.fps = choice.fps;
    opts.player.palette = common.palette();
    opts.log_path = log_path;
    std::uint64_t accepted = 0;
    {
        Controller controller(opts, cat);
        controller.set_mode(mode);
        for (std::int64_t k = 0; k < frames; ++k) {
            controller.step();
        }
        const auto st = controller.state();
        for (const auto& e : st.eyes) accepted += e.last_sequence ? *e.last_sequence + 1 : 0;
    }
    const auto log = framelog_load(log_path);
    out << describe(mode) << ": " << frames << " messages per eye at " << choice.fps << " fps, " << log.records.size()
        << " records in " << log_path << ", last sequence " << (frames - 1) << ", driver accepted " << accepted << "\n";
    return 0;
}

int cmd_export(Common& common, const LucemeChoice& choice, const std::string& dir, const std::string& format,
               std::ostream& out) {
    if (format != "ppm-seq") throw ConfigError("unsupported export format '" + format + "'");
    const auto def = choice.definition(common.catalog());
    const auto frames = stream(def, choice.fps, choice.repeats, common.palette());
    fs::create_directories(dir);
    SimulatedDriver driver;
    for (std::size_t k = 0; k < frames.size(); ++k) {
        for (std::uint8_t eye = 0; eye < 2; ++eye) {
            driver.apply({eye, static_cast<std::uint32_t>(k), frames[k]});
        }
        write_bytes(fs::path(dir) / numbered(static_cast<int>(k)), driver.render_image(RenderTarget::Both));
    }
    out << "wrote " << frames.size() << " frames of " << def.name << " to " << dir << "\n";
    return 0;
}

int cmd_replay(const std::string& log_path, const std::string& dir, std::ostream& out, std::ostream& err) {
    const auto log = framelog_load(log_path);
    fs::create_directories(dir);
    SimulatedDriver driver;
    int written = 0;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const auto& r = log.records[i];
        driver.apply(r.message, r.timestamp_ms);
        const bool last_of_instant = i + 1 == log.records.size() || log.records[i + 1].timestamp_ms != r.timestamp_ms;
        if (last_of_instant) {
            write_bytes(fs::path(dir) / numbered(written++), driver.render_image(RenderTarget::Both));
        }
    }
    if (log.truncated) {
        err << "warning: " << log_path << " ends with a partial record\n";
    }
    out << "replayed " << log.records.size() << " messages into " << written << " frames in " << dir << "\n";
    return 0;
}

int cmd_score(const std::string& csv, std::optional<double> swim, const std::string& ratings,
              const std::string& format, std::ostream& out) {
    auto records = parse_responses_csv(read_text(csv));
    if (swim) records = adjust_time(std::move(records), *swim);
    std::optional<RatingMatrix> matrix;
    if (!ratings.empty()) matrix = parse_rating_matrix(read_text(ratings));
    const auto report = score(records, matrix);
    out << (format == "kv" ? format_key_values(report) : format_text(report));
    return 0;
}

int cmd_decode_gaze(const std::string& path, int eye, std::ostream& out) {
    LedFrame frame;
    if (fs::path(path).extension() == ".hrlog") {
        const auto log = framelog_load(path);
        bool found = false;
        for (const auto& r : log.records) {
            if (r.message.eye_id == eye) {
                frame = r.message.frame;
                found = true;
            }
        }
        if (!found) throw DataError("no frames for eye " + std::to_string(eye) + " in " + path);
    } else {
        const auto bytes = read_bytes(path);
        auto image = parse_ppm(bytes);
        if (eye == 1) {
            if (image.width < 2 * kEyeImageSize) throw FormatError("image holds a single eye");
            PpmImage right{kEyeImageSize, image.height, {}};
            for (int y = 0; y < image.height; ++y) {
                const auto* row = &image.rgb[(static_cast<std::size_t>(y) * image.width + kEyeImageSize) * 3];
                right.rgb.insert(right.rgb.end(), row, row + kEyeImageSize * 3);
            }
            image = std::move(right);
        }
        frame = frame_from_ppm(image);
    }
    const double deg = estimate_gaze(frame);
    out << std::fixed << std::setprecision(2) << deg << " deg (gaze cue " << quantize_gaze(deg).degrees() << ")\n";
    return 0;
}

std::pair<std::string, int> split_listen(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw ConfigError("listen address must be host:port");
    int port = 0;
    try {
        port = std::stoi(addr.substr(colon + 1));
    } catch (const std::exception&) {
        throw ConfigError("bad port in listen address '" + addr + "'");
    }
    if (port < 0 || port > 65535) throw ConfigError("bad port in listen address '" + addr + "'");
    return {addr.substr(0, colon), port};
}

int cmd_serve(Common& common, const std::string& listen, int fps, const std::string& log_path,
              const std::string& static_dir, std::ostream& out) {
    ControllerOptions opts;
    opts.player.fps = fps;
    opts.player.palette = common.palette();
    if (!log_path.empty()) opts.log_path = log_path;
    Controller controller(opts, common.catalog());

    ServerOptions server_opts;
    std::tie(server_opts.host, server_opts.port) = split_listen(listen);
    if (!static_dir.empty()) server_opts.static_dir = static_dir;
    ApiServer server(controller, server_opts);
    const int port = server.bind();

    g_interrupted = false;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    controller.start();
    std::thread http([&] { server.serve(); });
    out << "serving on http://" << server_opts.host << ":" << port << " at " << fps << " fps" << std::endl;
    while (!g_interrupted) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    server.stop();
    http.join();
    controller.stop();
    out << "stopped" << std::endl;
    return 0;
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"HREye luceme engine, simulator and study tools", args.empty() ? "hreye" : args.front()};
    app.require_subcommand(1);

    Common common;
    common.catalog_dir = env_or("HREYE_CATALOG_DIR", "");
    app.add_option("--catalog-dir", common.catalog_dir, "Directory of .luceme files overriding the built-in catalog");
    app.add_option("--palette", common.palette_file, "Palette file (name = r,g,b,a)");

    auto* list = app.add_subcommand("list", "List active and ocular lucemes");

    LucemeChoice play_choice;
    std::string play_log;
    auto* play = app.add_subcommand("play", "Run a luceme through the controller and simulated driver");
    add_luceme_options(play, play_choice);
    play->add_option("--log", play_log, "Frame log to write (default <luceme-id>.hrlog)");

    LucemeChoice export_choice;
    std::string export_dir;
    std::string export_format = "ppm-seq";
    auto* exp = app.add_subcommand("export", "Render a luceme to numbered PPM frames");
    add_luceme_options(exp, export_choice);
    exp->add_option("--out", export_dir, "Output directory")->required();
    exp->add_option("--format", export_format, "Output format (ppm-seq)");

    std::string listen = env_or("HREYE_LISTEN", "127.0.0.1:8080");
    int serve_fps = kDefaultFps;
    std::string serve_log;
    std::string static_dir = env_or("HREYE_STATIC_DIR", "");
    auto* serve = app.add_subcommand("serve", "Run the controller service with a simulated device");
    serve->add_option("--listen", listen, "host:port (env HREYE_LISTEN)");
    serve->add_option("--fps", serve_fps, "Frame rate")->check(CLI::Range(kMinFps, kMaxFps));
    serve->add_option("--log", serve_log, "Record every emitted message to this frame log");
    serve->add_option("--static-dir", static_dir, "Console assets to serve at / (env HREYE_STATIC_DIR)");

    std::string replay_log;
    std::string replay_dir;
    auto* replay = app.add_subcommand("replay", "Re-render a frame log to PPM frames");
    replay->add_option("log", replay_log, "Frame log (.hrlog)")->required();
    replay->add_option("--out", replay_dir, "Output directory")->required();

    std::string score_csv;
    std::optional<double> swim;
    std::string ratings;
    std::string score_format = "text";
    auto* sc = app.add_subcommand("score", "Compute study metrics from a response CSV");
    sc->add_option("responses", score_csv, "Response CSV")->required();
    sc->add_option("--swim-time", swim, "Mean swim time added to OLED answers (s)")->check(CLI::NonNegativeNumber);
    sc->add_option("--ratings", ratings, "Rating matrix for Fleiss' kappa");
    sc->add_option("--format", score_format, "text or kv")->check(CLI::IsMember({"text", "kv"}));

    std::string decode_path;
    int decode_eye = 0;
    auto* dg = app.add_subcommand("decode-gaze", "Estimate the gaze direction shown in a PPM frame or frame log");
    dg->add_option("input", decode_path, "PPM frame or .hrlog")->required();
    dg->add_option("--eye", decode_eye, "Eye to decode (0 left, 1 right)")->check(CLI::Range(0, 1));

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*list) return cmd_list(common, out);
        if (*play) {
            if (play_log.empty()) play_log = play_choice.id + ".hrlog";
            return cmd_play(common, play_choice, play_log, out);
        }
        if (*exp) return cmd_export(common, export_choice, export_dir, export_format, out);
        if (*serve) return cmd_serve(common, listen, serve_fps, serve_log, static_dir, out);
        if (*replay) return cmd_replay(replay_log, replay_dir, out, err);
        if (*sc) return cmd_score(score_csv, swim, ratings, score_format, out);
        if (*dg) return cmd_decode_gaze(decode_path, decode_eye, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace hreye::cli

#include "hreye/lucemes.hpp"

#include "embedded_catalog.hpp"
#include "hreye/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace hreye {

namespace {

struct ActiveInfo {
    ActiveLucemeId id;
    std::string_view name;
    std::string_view gloss;
};

constexpr std::array<ActiveInfo, 16> kActiveInfo{{
    {ActiveLucemeId::Affirmative, "Affirmative", "Yes / okay."},
    {ActiveLucemeId::Negative, "Negative", "No."},
    {ActiveLucemeId::Danger, "Danger", "Danger nearby."},
    {ActiveLucemeId::Attention, "Attention", "Look at the AUV."},
    {ActiveLucemeId::Malfunction, "Malfunction", "The AUV has an internal fault."},
    {ActiveLucemeId::WaitCMD, "WaitCMD", "Waiting for a command."},
    {ActiveLucemeId::GoLeft, "GoLeft", "Go left / AUV moving left."},
    {ActiveLucemeId::GoRight, "GoRight", "Go right / AUV moving right."},
    {ActiveLucemeId::GoUp, "GoUp", "Go up / AUV moving up."},
    {ActiveLucemeId::GoDown, "GoDown", "Go down / AUV moving down."},
    {ActiveLucemeId::WhichWay, "WhichWay", "Which way should the AUV go?"},
    {ActiveLucemeId::Stay, "Stay", "Hold your position."},
    {ActiveLucemeId::ComeHere, "ComeHere", "Come to the AUV."},
    {ActiveLucemeId::FollowMe, "FollowMe", "Follow the AUV."},
    {ActiveLucemeId::FollowYou, "FollowYou", "The AUV will follow you."},
    {ActiveLucemeId::BatteryLevel, "BatteryLevel", "Battery charge is at the shown level."},
}};

const ActiveInfo& info(ActiveLucemeId id) {
    return kActiveInfo[static_cast<std::size_t>(id)];
}

// The BatteryLevel gauge is the first Information-Blue Shape track.
Track* find_gauge(LucemeDef& def) {
    for (auto& t : def.tracks) {
        if (std::holds_alternative<Shape>(t.primitive.params) && t.primitive.color == PaletteColor::InformationBlue) {
            return &t;
        }
    }
    return nullptr;
}

Track track(std::int64_t start, std::int64_t end, RingScope scope, PaletteColor color, PrimitiveParams params,
            int intensity = 255) {
    return Track{Primitive{std::move(params), scope, color, intensity}, start, end};
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot read " + path.string());
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

std::string_view to_string(ActiveLucemeId id) noexcept {
    return info(id).name;
}

std::string_view gloss(ActiveLucemeId id) noexcept {
    return info(id).gloss;
}

std::optional<ActiveLucemeId> parse_active_luceme(std::string_view name) noexcept {
    for (const auto& i : kActiveInfo) {
        if (i.name == name) return i.id;
    }
    return std::nullopt;
}

GazeAngle GazeAngle::from_degrees(int degrees) {
    if (degrees < 0 || degrees > 330 || degrees % 30 != 0) {
        throw DomainError("gaze angle must be a multiple of 30 in [0, 330], got " + std::to_string(degrees));
    }
    return GazeAngle(degrees);
}

std::array<GazeAngle, 12> GazeAngle::all() {
    std::array<GazeAngle, 12> out;
    for (int i = 0; i < 12; ++i) out[i] = GazeAngle(i * 30);
    return out;
}

std::string to_string(const OcularLucemeId& id) {
    switch (id.kind) {
        case OcularKind::Steady: return "Ocular-Steady";
        case OcularKind::Blink: return "Ocular-Blink";
        case OcularKind::Squint: return "Ocular-Squint";
        case OcularKind::EyesWide: return "Ocular-EyesWide";
        case OcularKind::Gaze: break;
    }
    return "Ocular-" + std::to_string(id.angle.degrees());
}

std::string_view gloss(const OcularLucemeId& id) noexcept {
    switch (id.kind) {
        case OcularKind::Steady: return "Resting eye.";
        case OcularKind::Blink: return "A blink.";
        case OcularKind::Squint: return "Squinting / focusing.";
        case OcularKind::EyesWide: return "Eyes widen.";
        case OcularKind::Gaze: break;
    }
    return "Looking toward the given direction.";
}

std::string to_string(const LucemeId& id) {
    return std::visit(
        [](const auto& v) -> std::string {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, ActiveLucemeId>) {
                return std::string(to_string(v));
            } else {
                return to_string(v);
            }
        },
        id);
}

std::optional<LucemeId> parse_luceme_id(std::string_view name) {
    if (auto active = parse_active_luceme(name)) {
        return LucemeId{*active};
    }
    constexpr std::string_view prefix = "Ocular-";
    if (!name.starts_with(prefix)) {
        return std::nullopt;
    }
    const auto rest = name.substr(prefix.size());
    if (rest == "Steady") return LucemeId{OcularLucemeId{OcularKind::Steady, {}}};
    if (rest == "Blink") return LucemeId{OcularLucemeId{OcularKind::Blink, {}}};
    if (rest == "Squint") return LucemeId{OcularLucemeId{OcularKind::Squint, {}}};
    if (rest == "EyesWide") return LucemeId{OcularLucemeId{OcularKind::EyesWide, {}}};
    int deg = 0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), deg);
    if (ec != std::errc{} || ptr != rest.data() + rest.size() || deg < 0 || deg > 330 || deg % 30 != 0) {
        return std::nullopt;
    }
    return LucemeId{OcularLucemeId::gaze(GazeAngle::from_degrees(deg))};
}

std::vector<LedAddress> battery_gauge_leds(double level) {
    if (!(level >= 0.0 && level <= 1.0)) {
        throw DomainError("battery level must lie in [0, 1]");
    }
    const auto count = static_cast<int>(std::lround(level * kOuterCount));
    const int top = nearest_led(Ring::Outer, 90.0).index;
    std::vector<LedAddress> leds;
    for (int k = 0; k < count; ++k) {
        leds.push_back({Ring::Outer, ((top - k) % kOuterCount + kOuterCount) % kOuterCount});
    }
    return leds;
}

const LucemeCatalog& LucemeCatalog::builtin() {
    static const LucemeCatalog cat = [] {
        LucemeCatalog c;
        for (const auto& file : detail::embedded_lucemes()) {
            c.insert(parse_luceme_file(file.text), std::string(file.file));
        }
        c.require_complete();
        return c;
    }();
    return cat;
}

LucemeCatalog LucemeCatalog::with_overrides(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw ConfigError("catalog directory " + dir + " does not exist");
    }
    LucemeCatalog c = builtin();
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".luceme") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        try {
            c.insert(parse_luceme_file(read_file(path)), path.string());
        } catch (const ParseError& e) {
            throw ConfigError(path.string() + ": " + e.what());
        }
    }
    return c;
}

void LucemeCatalog::insert(LucemeDef def, const std::string& origin) {
    const auto id = parse_active_luceme(def.name);
    if (!id) {
        throw ConfigError(origin + ": '" + def.name + "' is not an active luceme");
    }
    defs_.insert_or_assign(*id, std::move(def));
}

void LucemeCatalog::require_complete() const {
    for (auto id : kAllActiveLucemes) {
        if (!defs_.contains(id)) {
            throw ConfigError("catalog is missing " + std::string(to_string(id)));
        }
    }
}

const LucemeDef& LucemeCatalog::raw(ActiveLucemeId id) const {
    return defs_.at(id);
}

LucemeDef LucemeCatalog::active(ActiveLucemeId id, double level) const {
    LucemeDef def = raw(id);
    if (id != ActiveLucemeId::BatteryLevel) {
        return def;
    }
    auto leds = battery_gauge_leds(level);
    if (Track* gauge = find_gauge(def)) {
        if (leds.empty()) {
            def.tracks.erase(def.tracks.begin() + (gauge - def.tracks.data()));
        } else {
            std::get<Shape>(gauge->primitive.params).leds = std::move(leds);
        }
    }
    return def;
}

LucemeDef catalog(ActiveLucemeId id, double level) {
    return LucemeCatalog::builtin().active(id, level);
}

LucemeDef ocular(const OcularLucemeId& id, const GazeStyle& style) {
    const auto white = PaletteColor::ScleraWhite;
    const auto pink = PaletteColor::IrisPink;
    const ArcHold full{0.0, 180.0};
    constexpr std::int64_t dur = 2000;

    LucemeDef def;
    def.name = to_string(id);
    def.duration_ms = dur;
    def.loop = true;

    switch (id.kind) {
        case OcularKind::Steady:
            def.tracks = {track(0, dur, RingScope::Outer, white, Fill{}),
                          track(0, dur, RingScope::Inner, pink, full)};
            break;
        case OcularKind::Blink:
            // 200 ms fully closed in the middle of the cycle.
            def.tracks = {track(0, 900, RingScope::Outer, white, Fill{}),
                          track(0, 900, RingScope::Inner, pink, full),
                          track(1100, dur, RingScope::Outer, white, Fill{}),
                          track(1100, dur, RingScope::Inner, pink, full)};
            break;
        case OcularKind::Squint:
            def.tracks = {track(0, dur, RingScope::Inner, pink, full),
                          track(0, 500, RingScope::Outer, white, Fill{}),
                          track(500, 1500, RingScope::Outer, white, ArcHold{0.0, 45.0}),
                          track(500, 1500, RingScope::Outer, white, ArcHold{180.0, 45.0}),
                          track(1500, dur, RingScope::Outer, white, Fill{})};
            break;
        case OcularKind::EyesWide: {
            const int base = Palette::defaults()(white).a;
            def.tracks = {track(0, dur, RingScope::Inner, pink, full),
                          track(0, dur, RingScope::Outer, white, Fill{}),
                          track(500, 1500, RingScope::Outer, white, Pulse{1000, base, 255, 0})};
            break;
        }
        case OcularKind::Gaze: {
            if (style.pupil_leds < 1 || style.pupil_leds > kInnerCount || style.pupil_leds % 2 == 0) {
                throw ConfigError("pupil width must be an odd LED count in [1, 16]");
            }
            if (style.entry_ms <= 0 || style.entry_ms >= style.duration_ms) {
                throw ConfigError("gaze entry must be shorter than the gaze duration");
            }
            const double center = led_angle(nearest_led(Ring::Inner, id.angle.degrees()));
            const auto end = style.duration_ms;
            const auto entry = style.entry_ms;
            def.duration_ms = end;
            def.loop = false;
            // Iris starts uniformly bright and relaxes to the dim level while
            // the pupil arc stays at full alpha.
            def.tracks = {
                track(0, end, RingScope::Outer, white, Fill{}),
                track(0, entry, RingScope::Inner, pink, Pulse{2 * entry, style.dim_alpha, 255, entry}),
                track(entry, end, RingScope::Inner, pink, Fill{}, style.dim_alpha),
                track(0, end, RingScope::Inner, pink, ArcHold{center, style.pupil_half_width_deg()}),
            };
            break;
        }
    }
    validate(def);
    return def;
}

GazeAngle quantize_gaze(double angle_deg) {
    const double a = normalize_deg(angle_deg);
    const auto step = static_cast<int>(std::floor(a / 30.0 + 0.5)) % 12;
    return GazeAngle::from_degrees(step * 30);
}

LedFrame render_gaze(GazeAngle angle, std::int64_t t_ms, const GazeStyle& style) {
    return sample(ocular(OcularLucemeId::gaze(angle), style), t_ms);
}

double estimate_gaze(const LedFrame& frame, const EyeMount& mount) {
    double sx = 0.0;
    double sy = 0.0;
    double total = 0.0;
    for (int i = 0; i < kInnerCount; ++i) {
        const LedAddress addr{Ring::Inner, i};
        const auto& p = frame.at(addr);
        const bool pink = p.r > p.g && p.r > 0 && p.b > 0;
        if (!pink || p.a <= kGazeDimThreshold) {
            continue;
        }
        const double rad = led_angle(addr, mount) * std::numbers::pi / 180.0;
        sx += p.a * std::cos(rad);
        sy += p.a * std::sin(rad);
        total += p.a;
    }
    if (total == 0.0) {
        throw EstimationError("no pupil pixels on the inner ring");
    }
    if (std::hypot(sx, sy) < 1e-9 * total) {
        throw EstimationError("pupil pixels are spread evenly; direction undefined");
    }
    return normalize_deg(std::atan2(sy, sx) * 180.0 / std::numbers::pi);
}

}  // namespace hreye

#include "hreye/animation.hpp"

#include "hreye/error.hpp"

#include <cmath>
#include <numbers>

namespace hreye {

namespace {

constexpr double kAngleEps = 1e-9;

std::vector<Ring> rings_of(RingScope scope) {
    switch (scope) {
        case RingScope::Outer: return {Ring::Outer};
        case RingScope::Inner: return {Ring::Inner};
        case RingScope::Both: break;
    }
    return {Ring::Outer, Ring::Inner};
}

std::uint8_t scale_alpha(int alpha, int scale) {
    return static_cast<std::uint8_t>((alpha * scale + 127) / 255);
}

bool flash_on(std::int64_t t_ms, std::int64_t on_ms, std::int64_t off_ms) {
    return t_ms % (on_ms + off_ms) < on_ms;
}

struct Painter {
    LedFrame& frame;
    ColorRGBA color;

    void ring(Ring r) const {
        for (int i = 0; i < ring_count(r); ++i) {
            frame.at({r, i}) = color;
        }
    }
    void led(const LedAddress& addr) const { frame.at(addr) = color; }
};

void render_chase(const Chase& chase, Ring ring, const Painter& paint, std::int64_t t_ms) {
    const int n = ring_count(ring);
    const double sign = chase.direction == Direction::Ccw ? 1.0 : -1.0;
    const int step_back = chase.direction == Direction::Ccw ? -1 : 1;
    const double travel = chase.speed_deg_s * static_cast<double>(t_ms) / 1000.0;
    const double spread = 360.0 / static_cast<double>(chase.segments.size());
    for (std::size_t j = 0; j < chase.segments.size(); ++j) {
        const double head = chase.start_deg + sign * (travel - static_cast<double>(j) * spread);
        int idx = nearest_led(ring, head).index;
        for (int k = 0; k < chase.segments[j]; ++k) {
            paint.led({ring, idx});
            idx = ((idx + step_back) % n + n) % n;
        }
    }
}

void render_wipe(const Wipe& wipe, Ring ring, const Painter& paint, std::int64_t t_ms) {
    const double progress =
        static_cast<double>(std::min(t_ms, wipe.duration_ms)) / static_cast<double>(wipe.duration_ms);
    const double swept = (wipe.end_deg - wipe.start_deg) * progress;
    for (int i = 0; i < ring_count(ring); ++i) {
        const double angle = led_angle({ring, i});
        const double along = swept >= 0.0 ? normalize_deg(angle - wipe.start_deg)
                                          : normalize_deg(wipe.start_deg - angle);
        if (along <= std::fabs(swept) + kAngleEps) {
            paint.led({ring, i});
        }
    }
}

}  // namespace

std::string_view to_string(RingScope scope) noexcept {
    switch (scope) {
        case RingScope::Outer: return "Outer";
        case RingScope::Inner: return "Inner";
        case RingScope::Both: break;
    }
    return "Both";
}

std::string_view kind_name(const PrimitiveParams& params) noexcept {
    static constexpr std::string_view names[] = {"Fill", "Flash", "Pulse", "Chase", "Wipe", "ArcHold", "Shape"};
    return names[params.index()];
}

void validate(const Primitive& primitive) {
    if (primitive.intensity < 0 || primitive.intensity > 255) {
        throw DomainError("intensity must lie in [0, 255]");
    }
    struct Check {
        void operator()(const Fill&) const {}
        void operator()(const Flash& p) const {
            if (p.on_ms <= 0 || p.off_ms <= 0) throw DomainError("Flash on_ms and off_ms must be > 0");
        }
        void operator()(const Pulse& p) const {
            if (p.period_ms <= 0) throw DomainError("Pulse period_ms must be > 0");
            if (p.phase_ms < 0) throw DomainError("Pulse phase_ms must be >= 0");
            if (p.min_alpha < 0 || p.max_alpha > 255 || p.min_alpha > p.max_alpha) {
                throw DomainError("Pulse alphas must satisfy 0 <= min_alpha <= max_alpha <= 255");
            }
        }
        void operator()(const Chase& p) const {
            if (p.segments.empty()) throw DomainError("Chase needs at least one segment");
            for (int len : p.segments) {
                if (len < 1) throw DomainError("Chase segment lengths must be >= 1");
            }
            if (!std::isfinite(p.speed_deg_s) || !std::isfinite(p.start_deg)) {
                throw DomainError("Chase angles and speed must be finite");
            }
        }
        void operator()(const Wipe& p) const {
            if (p.duration_ms <= 0) throw DomainError("Wipe duration_ms must be > 0");
            if (!std::isfinite(p.start_deg) || !std::isfinite(p.end_deg)) {
                throw DomainError("Wipe angles must be finite");
            }
            if (std::fabs(p.end_deg - p.start_deg) > 360.0) {
                throw DomainError("Wipe may sweep at most 360 degrees");
            }
        }
        void operator()(const ArcHold& p) const {
            if (!std::isfinite(p.center_deg)) throw DomainError("ArcHold center must be finite");
            if (!(p.half_width_deg >= 0.0 && p.half_width_deg <= 180.0)) {
                throw DomainError("ArcHold half_width_deg must lie in [0, 180]");
            }
        }
        void operator()(const Shape& p) const {
            if (p.leds.empty()) throw DomainError("Shape needs at least one LED");
            for (const auto& a : p.leds) {
                if (!is_valid(a)) throw AddressError("Shape LED index out of range");
            }
            if (p.on_ms < 0 || p.off_ms < 0 || (p.off_ms > 0 && p.on_ms == 0)) {
                throw DomainError("Shape on_ms/off_ms must be >= 0, on_ms > 0 when flashing");
            }
        }
    };
    std::visit(Check{}, primitive.params);
}

void validate(const LucemeDef& def) {
    if (def.name.empty() || def.name.find_first_of(" \t\r\n") != std::string::npos) {
        throw DomainError("luceme name must be a non-empty word");
    }
    if (def.duration_ms <= 0) {
        throw DomainError("luceme duration must be > 0");
    }
    for (const auto& track : def.tracks) {
        if (track.start_ms < 0 || track.start_ms >= track.end_ms) {
            throw DomainError("track must satisfy 0 <= start < end");
        }
        if (track.end_ms > def.duration_ms) {
            throw DomainError("track ends after the luceme duration");
        }
        validate(track.primitive);
    }
}

double pulse_alpha(const Pulse& pulse, std::int64_t t_ms) {
    const auto local = (t_ms + pulse.phase_ms) % pulse.period_ms;
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(local) / static_cast<double>(pulse.period_ms);
    return pulse.min_alpha + (pulse.max_alpha - pulse.min_alpha) * (1.0 - std::cos(phase)) / 2.0;
}

LedFrame render_primitive(const Primitive& primitive, std::int64_t t_ms, const Palette& palette) {
    LedFrame frame;
    ColorRGBA color = palette(primitive.color);
    if (primitive.color == PaletteColor::Off) {
        return frame;
    }
    color.a = scale_alpha(color.a, primitive.intensity);

    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            Painter paint{frame, color};
            if constexpr (std::is_same_v<P, Fill>) {
                for (Ring r : rings_of(primitive.scope)) paint.ring(r);
            } else if constexpr (std::is_same_v<P, Flash>) {
                if (flash_on(t_ms, p.on_ms, p.off_ms)) {
                    for (Ring r : rings_of(primitive.scope)) paint.ring(r);
                }
            } else if constexpr (std::is_same_v<P, Pulse>) {
                const int level = static_cast<int>(std::lround(pulse_alpha(p, t_ms)));
                // Pulse drives alpha directly; only the track intensity scales it.
                paint.color.a = scale_alpha(level, primitive.intensity);
                if (paint.color.a > 0) {
                    for (Ring r : rings_of(primitive.scope)) paint.ring(r);
                }
            } else if constexpr (std::is_same_v<P, Chase>) {
                for (Ring r : rings_of(primitive.scope)) render_chase(p, r, paint, t_ms);
            } else if constexpr (std::is_same_v<P, Wipe>) {
                for (Ring r : rings_of(primitive.scope)) render_wipe(p, r, paint, t_ms);
            } else if constexpr (std::is_same_v<P, ArcHold>) {
                for (Ring r : rings_of(primitive.scope)) {
                    for (const auto& addr : arc(r, p.center_deg, p.half_width_deg)) paint.led(addr);
                }
            } else if constexpr (std::is_same_v<P, Shape>) {
                if (p.off_ms == 0 || flash_on(t_ms, p.on_ms, p.off_ms)) {
                    for (const auto& addr : p.leds) paint.led(addr);
                }
            }
        },
        primitive.params);
    return frame;
}

LedFrame sample(const LucemeDef& def, std::int64_t t_ms, const Palette& palette) {
    if (t_ms < 0) {
        throw DomainError("sample time must be >= 0");
    }
    const std::int64_t t = def.loop ? t_ms % def.duration_ms : std::min(t_ms, def.duration_ms - 1);
    LedFrame frame;
    for (const auto& track : def.tracks) {
        if (t >= track.start_ms && t < track.end_ms) {
            frame = composite(frame, render_primitive(track.primitive, t - track.start_ms, palette));
        }
    }
    return frame;
}

std::int64_t stream_length(const LucemeDef& def, int fps, int repeats) {
    if (fps < kMinFps || fps > kMaxFps) {
        throw ConfigError("fps must lie in [" + std::to_string(kMinFps) + ", " + std::to_string(kMaxFps) + "]");
    }
    if (repeats < 1) {
        throw ConfigError("repeats must be >= 1");
    }
    return static_cast<std::int64_t>(repeats) * def.duration_ms * fps / 1000;
}

std::int64_t frame_time_ms(std::int64_t k, int fps) {
    return k * 1000 / fps;
}

std::vector<LedFrame> stream(const LucemeDef& def, int fps, int repeats, const Palette& palette) {
    const auto count = stream_length(def, fps, repeats);
    std::vector<LedFrame> frames;
    frames.reserve(static_cast<std::size_t>(count));
    for (std::int64_t k = 0; k < count; ++k) {
        frames.push_back(sample(def, frame_time_ms(k, fps), palette));
    }
    return frames;
}

}  // namespace hreye

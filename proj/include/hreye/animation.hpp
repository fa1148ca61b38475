#pragma once

#include "hreye/frames.hpp"
#include "hreye/geometry.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hreye {

enum class RingScope { Outer, Inner, Both };

std::string_view to_string(RingScope scope) noexcept;

struct Fill {
    friend bool operator==(const Fill&, const Fill&) = default;
};

// Hard on/off cycle starting "on" at local time 0.
struct Flash {
    std::int64_t on_ms = 250;
    std::int64_t off_ms = 250;
    friend bool operator==(const Flash&, const Flash&) = default;
};

// Raised-cosine breathing. Drives alpha directly (the palette alpha is not
// applied), scaled by the track intensity:
//   alpha(t) = min + (max - min) * (1 - cos(2 pi (t + phase) / period)) / 2
struct Pulse {
    std::int64_t period_ms = 1500;
    int min_alpha = 0;
    int max_alpha = 255;
    std::int64_t phase_ms = 0;
    friend bool operator==(const Pulse&, const Pulse&) = default;
};

enum class Direction { Ccw, Cw };

// Segments spaced evenly around the ring, each trailing behind its head LED.
// Head angle of segment j: start + speed * t - j * 360 / segments (signed by
// direction).
struct Chase {
    std::vector<int> segments{4};
    double start_deg = 0.0;
    double speed_deg_s = 180.0;
    Direction direction = Direction::Ccw;
    friend bool operator==(const Chase&, const Chase&) = default;
};

// Progressive sweep from start_deg toward end_deg (sign of end - start gives
// the sense of rotation); fully swept at duration_ms, then held.
struct Wipe {
    double start_deg = 0.0;
    double end_deg = 360.0;
    std::int64_t duration_ms = 1000;
    friend bool operator==(const Wipe&, const Wipe&) = default;
};

struct ArcHold {
    double center_deg = 0.0;
    double half_width_deg = 180.0;
    friend bool operator==(const ArcHold&, const ArcHold&) = default;
};

// Explicit pixel set, optionally flashing (off_ms = 0 means steady).
struct Shape {
    std::vector<LedAddress> leds;
    std::int64_t on_ms = 0;
    std::int64_t off_ms = 0;
    friend bool operator==(const Shape&, const Shape&) = default;
};

using PrimitiveParams = std::variant<Fill, Flash, Pulse, Chase, Wipe, ArcHold, Shape>;

std::string_view kind_name(const PrimitiveParams& params) noexcept;

struct Primitive {
    PrimitiveParams params = Fill{};
    RingScope scope = RingScope::Both;
    PaletteColor color = PaletteColor::Off;
    int intensity = 255;  // scales the palette alpha, 0..255

    friend bool operator==(const Primitive&, const Primitive&) = default;
};

struct Track {
    Primitive primitive;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;

    friend bool operator==(const Track&, const Track&) = default;
};

struct LucemeDef {
    std::string name;
    std::int64_t duration_ms = 2000;
    bool loop = true;
    std::vector<Track> tracks;  // later tracks composite over earlier ones

    friend bool operator==(const LucemeDef&, const LucemeDef&) = default;
};

/// Throws DomainError describing the first violated invariant.
void validate(const Primitive& primitive);
void validate(const LucemeDef& def);

/// Frame produced by one primitive at local time `t_ms` (relative to the
/// track start).
LedFrame render_primitive(const Primitive& primitive, std::int64_t t_ms,
                          const Palette& palette = Palette::defaults());

/// Raised-cosine alpha of `pulse` at local time `t_ms`, before rounding.
double pulse_alpha(const Pulse& pulse, std::int64_t t_ms);

/// Deterministic frame of `def` at `t_ms`. Looping definitions wrap modulo the
/// duration; one-shot definitions hold their final state.
LedFrame sample(const LucemeDef& def, std::int64_t t_ms, const Palette& palette = Palette::defaults());

inline constexpr int kDefaultFps = 30;
inline constexpr int kMinFps = 1;
inline constexpr int kMaxFps = 120;

/// Number of frames `stream` produces: floor(repeats * duration * fps / 1000).
std::int64_t stream_length(const LucemeDef& def, int fps, int repeats);

/// Sample time of frame `k` at `fps`, integer milliseconds (floor).
std::int64_t frame_time_ms(std::int64_t k, int fps);

std::vector<LedFrame> stream(const LucemeDef& def, int fps, int repeats,
                             const Palette& palette = Palette::defaults());

/// Line-oriented luceme definition text. See catalog/*.luceme for examples.
LucemeDef parse_luceme_file(std::string_view text);
std::string serialize_luceme(const LucemeDef& def);

}  // namespace hreye

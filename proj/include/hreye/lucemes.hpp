#pragma once

#include "hreye/animation.hpp"
#include "hreye/frames.hpp"
#include "hreye/geometry.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hreye {

// The sixteen-symbol active luceme language.
enum class ActiveLucemeId {
    Affirmative,
    Negative,
    Danger,
    Attention,
    Malfunction,
    WaitCMD,
    GoLeft,
    GoRight,
    GoUp,
    GoDown,
    WhichWay,
    Stay,
    ComeHere,
    FollowMe,
    FollowYou,
    BatteryLevel,
};

inline constexpr std::array kAllActiveLucemes{
    ActiveLucemeId::Affirmative, ActiveLucemeId::Negative,  ActiveLucemeId::Danger,   ActiveLucemeId::Attention,
    ActiveLucemeId::Malfunction, ActiveLucemeId::WaitCMD,   ActiveLucemeId::GoLeft,   ActiveLucemeId::GoRight,
    ActiveLucemeId::GoUp,        ActiveLucemeId::GoDown,    ActiveLucemeId::WhichWay, ActiveLucemeId::Stay,
    ActiveLucemeId::ComeHere,    ActiveLucemeId::FollowMe,  ActiveLucemeId::FollowYou, ActiveLucemeId::BatteryLevel,
};

std::string_view to_string(ActiveLucemeId id) noexcept;
std::string_view gloss(ActiveLucemeId id) noexcept;
std::optional<ActiveLucemeId> parse_active_luceme(std::string_view name) noexcept;

// Gaze direction in 30 degree steps, Cartesian convention (90 = up).
class GazeAngle {
public:
    constexpr GazeAngle() = default;

    /// Throws DomainError unless `degrees` is a multiple of 30 in [0, 330].
    static GazeAngle from_degrees(int degrees);
    static std::array<GazeAngle, 12> all();

    constexpr int degrees() const noexcept { return degrees_; }

    friend auto operator<=>(const GazeAngle&, const GazeAngle&) = default;

private:
    constexpr explicit GazeAngle(int degrees) : degrees_(degrees) {}
    int degrees_ = 0;
};

enum class OcularKind { Steady, Blink, Squint, EyesWide, Gaze };

struct OcularLucemeId {
    OcularKind kind = OcularKind::Steady;
    GazeAngle angle;  // meaningful for Gaze only

    static OcularLucemeId gaze(GazeAngle a) { return {OcularKind::Gaze, a}; }

    friend bool operator==(const OcularLucemeId& a, const OcularLucemeId& b) {
        return a.kind == b.kind && (a.kind != OcularKind::Gaze || a.angle == b.angle);
    }
};

std::string to_string(const OcularLucemeId& id);
std::string_view gloss(const OcularLucemeId& id) noexcept;

using LucemeId = std::variant<ActiveLucemeId, OcularLucemeId>;

std::string to_string(const LucemeId& id);

/// Accepts active names ("FollowMe"), "Ocular-Steady"/"Ocular-Blink"/...,
/// and gaze cues as "Ocular-<deg>" with deg a multiple of 30.
std::optional<LucemeId> parse_luceme_id(std::string_view name);

// Shape of the ocular gaze cue.
struct GazeStyle {
    int pupil_leds = 5;          // odd number of contiguous inner LEDs
    int dim_alpha = 40;          // remaining iris pixels
    std::int64_t entry_ms = 300; // sweep from a uniform ring to the pupil arc
    std::int64_t duration_ms = 2000;

    double pupil_half_width_deg() const { return (pupil_leds - 1) / 2 * ring_spacing_deg(Ring::Inner); }
};

// Inner pixels at or below this alpha are treated as dim iris by the decoder.
inline constexpr int kGazeDimThreshold = 64;

inline constexpr double kDefaultBatteryLevel = 0.5;

/// Outer-ring LEDs of the battery gauge: round(level * 24) LEDs starting at
/// 90 deg and running clockwise.
std::vector<LedAddress> battery_gauge_leds(double level);

// Active luceme definitions, loaded from luceme files. The build embeds the
// default set from catalog/; a directory of files can override entries.
class LucemeCatalog {
public:
    static const LucemeCatalog& builtin();

    /// Builtin catalog with every `*.luceme` file in `dir` replacing the entry
    /// of the same name. Unknown names throw ConfigError.
    static LucemeCatalog with_overrides(const std::string& dir);

    /// Definition with `level` applied to the BatteryLevel gauge. Throws
    /// DomainError for levels outside [0, 1].
    LucemeDef active(ActiveLucemeId id, double level = kDefaultBatteryLevel) const;

    const LucemeDef& raw(ActiveLucemeId id) const;

private:
    LucemeCatalog() = default;
    void insert(LucemeDef def, const std::string& origin);
    void require_complete() const;

    std::map<ActiveLucemeId, LucemeDef> defs_;
};

LucemeDef catalog(ActiveLucemeId id, double level = kDefaultBatteryLevel);

LucemeDef ocular(const OcularLucemeId& id, const GazeStyle& style = {});

/// Nearest multiple of 30 deg on the circle; exact ties round counterclockwise.
GazeAngle quantize_gaze(double angle_deg);

/// Gaze cue frame at `t_ms`: Sclera-White outer ring, full-alpha pupil arc on
/// the inner ring around nearest_led(Inner, angle), dim iris elsewhere.
LedFrame render_gaze(GazeAngle angle, std::int64_t t_ms, const GazeStyle& style = {});

/// Alpha-weighted circular mean of the pink inner-ring pixels brighter than
/// kGazeDimThreshold, in degrees [0, 360). Throws EstimationError when no
/// pixel qualifies or the weights cancel out.
double estimate_gaze(const LedFrame& frame, const EyeMount& mount = {});

}  // namespace hreye

#pragma once

#include "hreye/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hreye {

struct ColorRGBA {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    std::uint8_t a = 0;  // intensity; 0 means dark whatever the RGB

    bool is_dark() const noexcept { return a == 0; }

    friend bool operator==(const ColorRGBA&, const ColorRGBA&) = default;
};

inline constexpr ColorRGBA kOff{0, 0, 0, 0};

struct RenderedRGB {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const RenderedRGB&, const RenderedRGB&) = default;
};

/// Alpha applied as a brightness multiplier: channel * a / 255.
RenderedRGB render_rgb(const ColorRGBA& c) noexcept;

// Instantaneous state of one eye. Pixels 0-23 are the outer ring, 24-39 the
// inner ring, each in index order.
class LedFrame {
public:
    using Pixels = std::array<ColorRGBA, kPixelCount>;

    LedFrame() = default;
    explicit LedFrame(const Pixels& pixels) : pixels_(pixels) {}

    ColorRGBA& operator[](std::size_t i) { return pixels_[i]; }
    const ColorRGBA& operator[](std::size_t i) const { return pixels_[i]; }

    ColorRGBA& at(const LedAddress& addr) { return pixels_[pixel_index(addr)]; }
    const ColorRGBA& at(const LedAddress& addr) const { return pixels_[pixel_index(addr)]; }

    const Pixels& pixels() const noexcept { return pixels_; }
    static constexpr std::size_t size() noexcept { return kPixelCount; }

    auto begin() noexcept { return pixels_.begin(); }
    auto end() noexcept { return pixels_.end(); }
    auto begin() const noexcept { return pixels_.begin(); }
    auto end() const noexcept { return pixels_.end(); }

    std::size_t lit_count() const noexcept;

    friend bool operator==(const LedFrame&, const LedFrame&) = default;

private:
    Pixels pixels_{};
};

LedFrame blank_frame() noexcept;

/// Painter's rule: an overlay pixel with a > 0 replaces the base pixel.
LedFrame composite(const LedFrame& base, const LedFrame& overlay) noexcept;

/// Rotates each ring of `frame` by the whole-LED shift closest to `offset_deg`.
LedFrame rotate_frame(const LedFrame& frame, double offset_deg);

// Named colors of the luceme language.
enum class PaletteColor {
    DirectionalYellow,
    ProblemRed,
    InformationBlue,
    AuvPurple,
    IrisPink,
    ScleraWhite,
    AffirmGreen,
    Off,
};

inline constexpr std::array kAllPaletteColors{
    PaletteColor::DirectionalYellow, PaletteColor::ProblemRed, PaletteColor::InformationBlue,
    PaletteColor::AuvPurple,         PaletteColor::IrisPink,   PaletteColor::ScleraWhite,
    PaletteColor::AffirmGreen,       PaletteColor::Off,
};

std::string_view to_string(PaletteColor color) noexcept;
std::optional<PaletteColor> parse_palette_color(std::string_view name) noexcept;

class Palette {
public:
    static constexpr double kDefaultMinSeparation = 80.0;

    /// The built-in color values.
    static const Palette& defaults();

    /// Parses `name = r,g,b,a` lines on top of the defaults. `#` starts a
    /// comment. Unknown names, bad channels and separation violations throw.
    static Palette parse(std::string_view text, double min_separation = kDefaultMinSeparation);
    static Palette load(const std::string& path, double min_separation = kDefaultMinSeparation);

    ColorRGBA operator()(PaletteColor color) const noexcept {
        return colors_[static_cast<std::size_t>(color)];
    }

    /// Palette entry whose RGB equals `c` (alpha ignored), if any.
    std::optional<PaletteColor> classify(const ColorRGBA& c) const noexcept;

    /// Throws ConfigError if two non-Off colors are closer than `min_separation`
    /// in Euclidean RGB, or Off is not dark.
    void validate(double min_separation = kDefaultMinSeparation) const;

    std::string serialize() const;

    friend bool operator==(const Palette&, const Palette&) = default;

private:
    Palette();
    std::array<ColorRGBA, kAllPaletteColors.size()> colors_{};
};

double rgb_distance(const ColorRGBA& a, const ColorRGBA& b) noexcept;

}  // namespace hreye

#include "hreye/frames.hpp"

#include "hreye/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hreye {

namespace {

constexpr std::array<std::string_view, kAllPaletteColors.size()> kColorNames{
    "Directional-Yellow", "Problem-Red", "Information-Blue", "AUV-Purple",
    "Iris-Pink",          "Sclera-White", "Affirm-Green",    "Off",
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

RenderedRGB render_rgb(const ColorRGBA& c) noexcept {
    auto scale = [&](std::uint8_t ch) {
        return static_cast<std::uint8_t>((static_cast<unsigned>(ch) * c.a) / 255u);
    };
    return {scale(c.r), scale(c.g), scale(c.b)};
}

std::size_t LedFrame::lit_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : pixels_) {
        n += p.is_dark() ? 0 : 1;
    }
    return n;
}

LedFrame blank_frame() noexcept {
    return LedFrame{};
}

LedFrame composite(const LedFrame& base, const LedFrame& overlay) noexcept {
    LedFrame out = base;
    for (std::size_t i = 0; i < LedFrame::size(); ++i) {
        if (overlay[i].a > 0) {
            out[i] = overlay[i];
        }
    }
    return out;
}

LedFrame rotate_frame(const LedFrame& frame, double offset_deg) {
    LedFrame out;
    for (Ring ring : {Ring::Outer, Ring::Inner}) {
        const int n = ring_count(ring);
        const int shift = rotation_steps(ring, offset_deg);
        for (int i = 0; i < n; ++i) {
            out.at({ring, (i + shift) % n}) = frame.at({ring, i});
        }
    }
    return out;
}

std::string_view to_string(PaletteColor color) noexcept {
    return kColorNames[static_cast<std::size_t>(color)];
}

std::optional<PaletteColor> parse_palette_color(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kColorNames.size(); ++i) {
        if (kColorNames[i] == name) {
            return kAllPaletteColors[i];
        }
    }
    return std::nullopt;
}

double rgb_distance(const ColorRGBA& a, const ColorRGBA& b) noexcept {
    const double dr = double(a.r) - b.r;
    const double dg = double(a.g) - b.g;
    const double db = double(a.b) - b.b;
    return std::sqrt(dr * dr + dg * dg + db * db);
}

Palette::Palette() {
    auto set = [&](PaletteColor c, ColorRGBA v) { colors_[static_cast<std::size_t>(c)] = v; };
    set(PaletteColor::DirectionalYellow, {255, 200, 0, 255});
    set(PaletteColor::ProblemRed, {255, 0, 0, 255});
    set(PaletteColor::InformationBlue, {0, 80, 255, 255});
    set(PaletteColor::AuvPurple, {160, 0, 255, 255});
    set(PaletteColor::IrisPink, {255, 60, 160, 255});
    set(PaletteColor::ScleraWhite, {255, 255, 255, 180});
    set(PaletteColor::AffirmGreen, {0, 255, 60, 255});
    set(PaletteColor::Off, kOff);
}

const Palette& Palette::defaults() {
    static const Palette palette;
    return palette;
}

Palette Palette::parse(std::string_view text, double min_separation) {
    Palette p;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line_no, "expected 'name = r,g,b,a'");
        }
        const auto name = trim(line.substr(0, eq));
        const auto color = parse_palette_color(name);
        if (!color) {
            throw ParseError(line_no, "unknown palette name '" + std::string(name) + "'");
        }

        std::array<int, 4> ch{};
        std::string_view rest = trim(line.substr(eq + 1));
        for (std::size_t k = 0; k < ch.size(); ++k) {
            const auto comma = rest.find(',');
            const auto field = trim(rest.substr(0, comma));
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), ch[k]);
            if (ec != std::errc{} || ptr != field.data() + field.size() || ch[k] < 0 || ch[k] > 255) {
                throw ParseError(line_no, "channel values must be integers in [0, 255]");
            }
            if ((k + 1 < ch.size()) == (comma == std::string_view::npos)) {
                throw ParseError(line_no, "expected exactly four channels");
            }
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        p.colors_[static_cast<std::size_t>(*color)] = {
            static_cast<std::uint8_t>(ch[0]), static_cast<std::uint8_t>(ch[1]),
            static_cast<std::uint8_t>(ch[2]), static_cast<std::uint8_t>(ch[3])};
    }
    p.validate(min_separation);
    return p;
}

Palette Palette::load(const std::string& path, double min_separation) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot read palette file " + path);
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), min_separation);
}

std::optional<PaletteColor> Palette::classify(const ColorRGBA& c) const noexcept {
    if (c.is_dark()) {
        return PaletteColor::Off;
    }
    for (auto color : kAllPaletteColors) {
        const auto& v = (*this)(color);
        if (color != PaletteColor::Off && v.r == c.r && v.g == c.g && v.b == c.b) {
            return color;
        }
    }
    return std::nullopt;
}

void Palette::validate(double min_separation) const {
    if (!(*this)(PaletteColor::Off).is_dark()) {
        throw ConfigError("Off must have alpha 0");
    }
    for (std::size_t i = 0; i < colors_.size(); ++i) {
        for (std::size_t j = i + 1; j < colors_.size(); ++j) {
            const auto ci = kAllPaletteColors[i];
            const auto cj = kAllPaletteColors[j];
            if (ci == PaletteColor::Off || cj == PaletteColor::Off) {
                continue;
            }
            if (rgb_distance(colors_[i], colors_[j]) <= min_separation) {
                throw ConfigError(std::string(to_string(ci)) + " and " + std::string(to_string(cj)) +
                                  " are too close in RGB");
            }
        }
    }
}

std::string Palette::serialize() const {
    std::string out;
    for (auto color : kAllPaletteColors) {
        const auto& c = (*this)(color);
        out += std::string(to_string(color)) + " = " + std::to_string(c.r) + "," + std::to_string(c.g) +
               "," + std::to_string(c.b) + "," + std::to_string(c.a) + "\n";
    }
    return out;
}

}  // namespace hreye

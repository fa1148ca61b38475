#include "hreye/geometry.hpp"

#include "hreye/error.hpp"

#include <algorithm>
#include <cmath>

namespace hreye {

namespace {

// Tolerance for angle comparisons; LED angles are exact binary fractions,
// so this only absorbs rounding from user-supplied centers.
constexpr double kAngleEps = 1e-9;

void require_valid(const LedAddress& addr) {
    if (!is_valid(addr)) {
        throw AddressError("LED index " + std::to_string(addr.index) + " out of range for " +
                           std::string(to_string(addr.ring)) + " ring");
    }
}

}  // namespace

std::string_view to_string(Ring ring) noexcept {
    return ring == Ring::Outer ? "Outer" : "Inner";
}

bool is_valid(const LedAddress& addr) noexcept {
    return addr.index >= 0 && addr.index < ring_count(addr.ring);
}

std::size_t pixel_index(const LedAddress& addr) {
    require_valid(addr);
    return addr.ring == Ring::Outer ? static_cast<std::size_t>(addr.index)
                                    : static_cast<std::size_t>(kOuterCount + addr.index);
}

LedAddress address_of_pixel(std::size_t pixel) {
    if (pixel >= static_cast<std::size_t>(kPixelCount)) {
        throw AddressError("pixel " + std::to_string(pixel) + " out of range");
    }
    if (pixel < static_cast<std::size_t>(kOuterCount)) {
        return {Ring::Outer, static_cast<int>(pixel)};
    }
    return {Ring::Inner, static_cast<int>(pixel) - kOuterCount};
}

double normalize_deg(double deg) {
    if (!std::isfinite(deg)) {
        throw DomainError("angle must be finite");
    }
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) {
        r += 360.0;
    }
    // fmod of a tiny negative value can round back up to exactly 360.
    return r >= 360.0 ? 0.0 : r;
}

double circular_distance(double a_deg, double b_deg) {
    const double d = std::fabs(normalize_deg(a_deg) - normalize_deg(b_deg));
    return std::min(d, 360.0 - d);
}

double led_angle(const LedAddress& addr) {
    require_valid(addr);
    return normalize_deg(addr.index * ring_spacing_deg(addr.ring));
}

double led_angle(const LedAddress& addr, const EyeMount& mount) {
    return normalize_deg(led_angle(addr) + mount.offset_deg);
}

LedAddress nearest_led(Ring ring, double angle_deg) {
    const double a = normalize_deg(angle_deg);
    LedAddress best{ring, 0};
    double best_dist = circular_distance(a, 0.0);
    for (int i = 1; i < ring_count(ring); ++i) {
        const double d = circular_distance(a, led_angle({ring, i}));
        if (d < best_dist - kAngleEps) {
            best = {ring, i};
            best_dist = d;
        }
    }
    return best;
}

std::vector<LedAddress> arc(Ring ring, double center_deg, double half_width_deg) {
    if (ring != Ring::Outer && ring != Ring::Inner) {
        throw AddressError("invalid ring");
    }
    if (!std::isfinite(half_width_deg) || half_width_deg < 0.0 || half_width_deg > 180.0) {
        throw DomainError("arc half width must lie in [0, 180]");
    }
    const double center = normalize_deg(center_deg);

    // Signed offset from the center in [-180, 180); sorting on it walks the
    // arc counterclockwise starting at its clockwise end.
    std::vector<std::pair<double, int>> members;
    for (int i = 0; i < ring_count(ring); ++i) {
        const double angle = led_angle({ring, i});
        if (circular_distance(angle, center) <= half_width_deg + kAngleEps) {
            double offset = normalize_deg(angle - center + 180.0) - 180.0;
            members.emplace_back(offset, i);
        }
    }
    std::sort(members.begin(), members.end());

    std::vector<LedAddress> out;
    out.reserve(members.size());
    for (const auto& [offset, i] : members) {
        out.push_back({ring, i});
    }
    return out;
}

int rotation_steps(Ring ring, double offset_deg) {
    return nearest_led(ring, offset_deg).index;
}

}  // namespace hreye

#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hreye {

// Layout of one HREye: an outer ring of 24 pixels and a concentric inner
// ring of 16. Index 0 sits at 0 deg (3 o'clock) and angles increase
// counterclockwise, matching the Cartesian convention of gaze angles.
enum class Ring { Outer, Inner };

inline constexpr int kOuterCount = 24;
inline constexpr int kInnerCount = 16;
inline constexpr int kPixelCount = kOuterCount + kInnerCount;

constexpr int ring_count(Ring ring) noexcept {
    return ring == Ring::Outer ? kOuterCount : kInnerCount;
}

constexpr double ring_spacing_deg(Ring ring) noexcept {
    return 360.0 / ring_count(ring);
}

std::string_view to_string(Ring ring) noexcept;

struct LedAddress {
    Ring ring = Ring::Outer;
    int index = 0;

    friend auto operator<=>(const LedAddress&, const LedAddress&) = default;
};

bool is_valid(const LedAddress& addr) noexcept;

// Position of `addr` in the 40-pixel frame: outer ring first, then inner.
std::size_t pixel_index(const LedAddress& addr);
LedAddress address_of_pixel(std::size_t pixel);

// Per-eye mounting rotation. Rotates every pixel's reported angle.
struct EyeMount {
    double offset_deg = 0.0;
};

/// Normalizes any finite angle to [0, 360).
double normalize_deg(double deg);

/// min(|a - b|, 360 - |a - b|) after normalization; always in [0, 180].
double circular_distance(double a_deg, double b_deg);

double led_angle(const LedAddress& addr);
double led_angle(const LedAddress& addr, const EyeMount& mount);

/// Address on `ring` closest to `angle_deg`. Exact ties go to the lower index.
LedAddress nearest_led(Ring ring, double angle_deg);

/// Addresses on `ring` within `half_width_deg` of `center_deg`, ordered
/// counterclockwise from the most clockwise member.
std::vector<LedAddress> arc(Ring ring, double center_deg, double half_width_deg);

/// Index shift, in whole LEDs, that best approximates rotating `ring` by
/// `offset_deg`.
int rotation_steps(Ring ring, double offset_deg);

}  // namespace hreye

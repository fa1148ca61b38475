#include "hreye/driver_sim.hpp"

#include "hreye/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace hreye {

SimulatedDriver::Eye& SimulatedDriver::eye(std::uint8_t id) {
    if (id >= kEyes) {
        throw AddressError("unknown eye id " + std::to_string(id));
    }
    return eyes_[id];
}

const SimulatedDriver::Eye& SimulatedDriver::eye(std::uint8_t id) const {
    if (id >= kEyes) {
        throw AddressError("unknown eye id " + std::to_string(id));
    }
    return eyes_[id];
}

bool SimulatedDriver::apply(const DriverMessage& msg, std::uint64_t timestamp_ms) {
    Eye& e = eye(msg.eye_id);
    std::lock_guard lock(e.mutex);
    if (e.last_sequence && msg.sequence <= *e.last_sequence) {
        ++e.rejected;
        return false;
    }
    e.frame = msg.frame;
    e.last_sequence = msg.sequence;
    e.updated_at_ms = timestamp_ms;
    return true;
}

std::size_t SimulatedDriver::feed(std::span<const std::uint8_t> bytes, std::uint64_t timestamp_ms) {
    std::vector<DriverMessage> messages;
    {
        std::lock_guard lock(feed_mutex_);
        messages = decoder_.feed(bytes);
    }
    std::size_t accepted = 0;
    for (const auto& m : messages) {
        accepted += apply(m, timestamp_ms) ? 1 : 0;
    }
    return accepted;
}

void SimulatedDriver::set_calibration(std::uint8_t eye_id, double offset_deg) {
    Eye& e = eye(eye_id);
    normalize_deg(offset_deg);  // rejects non-finite offsets
    std::lock_guard lock(e.mutex);
    e.offset_deg = offset_deg;
}

EyeSnapshot SimulatedDriver::snapshot(std::uint8_t eye_id) const {
    const Eye& e = eye(eye_id);
    EyeSnapshot snap;
    snap.eye_id = eye_id;
    {
        std::lock_guard lock(e.mutex);
        snap.frame = e.frame;
        snap.last_sequence = e.last_sequence;
        snap.calibration_offset_deg = e.offset_deg;
        snap.updated_at_ms = e.updated_at_ms;
    }
    if (snap.calibration_offset_deg != 0.0) {
        snap.frame = rotate_frame(snap.frame, snap.calibration_offset_deg);
    }
    return snap;
}

Bytes SimulatedDriver::render_image(RenderTarget target) const {
    switch (target) {
        case RenderTarget::Left: return render_ppm(snapshot(0).frame);
        case RenderTarget::Right: return render_ppm(snapshot(1).frame);
        case RenderTarget::Both: break;
    }
    return render_ppm_pair(snapshot(0).frame, snapshot(1).frame);
}

std::uint64_t SimulatedDriver::rejected_stale() const {
    std::uint64_t n = 0;
    for (const auto& e : eyes_) {
        std::lock_guard lock(e.mutex);
        n += e.rejected;
    }
    return n;
}

namespace {

// Disc center in a single-eye image. Snapped to a fine grid so that exact
// compass positions do not pick up trigonometric noise.
std::pair<double, double> disc_center(const LedAddress& addr) {
    const double radius = addr.ring == Ring::Outer ? kOuterRadiusPx : kInnerRadiusPx;
    const double rad = led_angle(addr) * std::numbers::pi / 180.0;
    const double half = kEyeImageSize / 2.0;
    auto snap = [](double v) { return std::round(v * 1e9) / 1e9; };
    return {snap(half + radius * std::cos(rad)), snap(half - radius * std::sin(rad))};
}

struct Canvas {
    int width;
    int height;
    std::vector<std::uint8_t> rgb;

    Canvas(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

    void disc(double cx, double cy, RenderedRGB color) {
        const double r2 = double(kLedRadiusPx) * kLedRadiusPx;
        const int x0 = std::max(0, static_cast<int>(std::floor(cx - kLedRadiusPx)));
        const int x1 = std::min(width - 1, static_cast<int>(std::ceil(cx + kLedRadiusPx)));
        const int y0 = std::max(0, static_cast<int>(std::floor(cy - kLedRadiusPx)));
        const int y1 = std::min(height - 1, static_cast<int>(std::ceil(cy + kLedRadiusPx)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double dx = x + 0.5 - cx;
                const double dy = y + 0.5 - cy;
                if (dx * dx + dy * dy <= r2) {
                    auto* p = &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
                    p[0] = color.r;
                    p[1] = color.g;
                    p[2] = color.b;
                }
            }
        }
    }

    void eye(const LedFrame& frame, int x_offset) {
        for (std::size_t i = 0; i < LedFrame::size(); ++i) {
            const auto addr = address_of_pixel(i);
            const auto color = render_rgb(frame[i]);
            if (color == RenderedRGB{}) {
                continue;
            }
            const auto [cx, cy] = disc_center(addr);
            disc(x_offset + cx, cy, color);
        }
    }

    Bytes ppm() const {
        const std::string header = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
        Bytes out(header.begin(), header.end());
        out.insert(out.end(), rgb.begin(), rgb.end());
        return out;
    }
};

}  // namespace

Bytes render_ppm(const LedFrame& frame) {
    Canvas c(kEyeImageSize, kEyeImageSize);
    c.eye(frame, 0);
    return c.ppm();
}

Bytes render_ppm_pair(const LedFrame& left, const LedFrame& right) {
    Canvas c(2 * kEyeImageSize, kEyeImageSize);
    c.eye(left, 0);
    c.eye(right, kEyeImageSize);
    return c.ppm();
}

std::pair<int, int> led_pixel_center(const LedAddress& addr) {
    const auto [cx, cy] = disc_center(addr);
    return {static_cast<int>(std::floor(cx)), static_cast<int>(std::floor(cy))};
}

PpmImage parse_ppm(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&] {
        skip_space();
        int v = 0;
        bool any = false;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos++] - '0');
            any = true;
            if (v > 1 << 20) throw FormatError("PPM dimension too large");
        }
        if (!any) throw FormatError("malformed PPM header");
        return v;
    };
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
        throw FormatError("not a binary PPM (P6) image");
    }
    pos = 2;
    PpmImage img;
    img.width = read_int();
    img.height = read_int();
    if (read_int() != 255) {
        throw FormatError("only maxval 255 PPM images are supported");
    }
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
        throw FormatError("malformed PPM header");
    }
    ++pos;
    const std::size_t need = static_cast<std::size_t>(img.width) * img.height * 3;
    if (bytes.size() - pos < need) {
        throw TruncationError("PPM pixel data truncated");
    }
    img.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                   bytes.begin() + static_cast<std::ptrdiff_t>(pos + need));
    return img;
}

LedFrame frame_from_ppm(const PpmImage& image) {
    if (image.width < kEyeImageSize || image.height < kEyeImageSize) {
        throw FormatError("image smaller than one rendered eye");
    }
    LedFrame frame;
    for (std::size_t i = 0; i < LedFrame::size(); ++i) {
        const auto addr = address_of_pixel(i);
        const auto [x, y] = led_pixel_center(addr);
        const auto* p = &image.rgb[(static_cast<std::size_t>(y) * image.width + x) * 3];
        const int peak = std::max({p[0], p[1], p[2]});
        if (peak == 0) {
            continue;
        }
        auto unscale = [&](std::uint8_t v) { return static_cast<std::uint8_t>((v * 255 + peak / 2) / peak); };
        frame[i] = {unscale(p[0]), unscale(p[1]), unscale(p[2]), static_cast<std::uint8_t>(peak)};
    }
    return frame;
}

}  // namespace hreye

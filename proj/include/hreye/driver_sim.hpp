#pragma once

#include "hreye/frames.hpp"
#include "hreye/protocol.hpp"

#include <array>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

namespace hreye {

struct EyeSnapshot {
    std::uint8_t eye_id = 0;
    LedFrame frame;  // calibration rotation already applied
    std::optional<std::uint32_t> last_sequence;
    double calibration_offset_deg = 0.0;
    std::uint64_t updated_at_ms = 0;
};

enum class RenderTarget { Left, Right, Both };

// Software stand-in for the HREye pair: applies decoded messages to per-eye
// LED state. One writer per eye, any number of concurrent readers; snapshots
// never observe a partially applied frame.
class SimulatedDriver {
public:
    static constexpr std::uint8_t kEyes = 2;

    /// True if accepted; false if the sequence is not newer than the last one
    /// seen for that eye. Throws AddressError for an unknown eye.
    bool apply(const DriverMessage& msg, std::uint64_t timestamp_ms = 0);

    /// Feeds raw wire bytes (any chunking); returns how many messages were
    /// accepted.
    std::size_t feed(std::span<const std::uint8_t> bytes, std::uint64_t timestamp_ms = 0);

    void set_calibration(std::uint8_t eye_id, double offset_deg);

    EyeSnapshot snapshot(std::uint8_t eye_id) const;

    /// Binary PPM of the current state.
    Bytes render_image(RenderTarget target) const;

    std::uint64_t rejected_stale() const;
    const StreamDecoder& stream_decoder() const noexcept { return decoder_; }

private:
    struct Eye {
        mutable std::mutex mutex;
        LedFrame frame;
        std::optional<std::uint32_t> last_sequence;
        double offset_deg = 0.0;
        std::uint64_t updated_at_ms = 0;
        std::uint64_t rejected = 0;
    };

    Eye& eye(std::uint8_t id);
    const Eye& eye(std::uint8_t id) const;

    std::array<Eye, kEyes> eyes_;
    std::mutex feed_mutex_;
    StreamDecoder decoder_;
};

// Snapshot renderer geometry (pixels).
inline constexpr int kEyeImageSize = 256;
inline constexpr int kOuterRadiusPx = 100;
inline constexpr int kInnerRadiusPx = 60;
inline constexpr int kLedRadiusPx = 9;

/// 256x256 P6 image: black background, one filled disc per LED at its
/// geometric position, color scaled by alpha.
Bytes render_ppm(const LedFrame& frame);

/// 512x256 P6 image with `left` drawn on the left half.
Bytes render_ppm_pair(const LedFrame& left, const LedFrame& right);

/// Center of `addr`'s disc in a single-eye image (y grows downward).
std::pair<int, int> led_pixel_center(const LedAddress& addr);

struct PpmImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;
};

/// Parses a binary P6 image with maxval 255. Throws FormatError.
PpmImage parse_ppm(std::span<const std::uint8_t> bytes);

/// Recovers an LedFrame from a rendered single-eye (or left half of a pair)
/// image by sampling each disc center. The renderer premultiplies by alpha,
/// so alpha is recovered as the peak RGB channel.
LedFrame frame_from_ppm(const PpmImage& image);

}  // namespace hreye

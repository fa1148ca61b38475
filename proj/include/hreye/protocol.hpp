#pragma once

#include "hreye/frames.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hreye {

// Controller -> driver message. Wire layout, big-endian:
//
//   offset  size  field
//        0     2  magic "HR" (0x48 0x52)
//        2     1  version (0x01)
//        3     1  eye id (0 = left, 1 = right)
//        4     4  sequence
//        8   160  40 x RGBA, LedFrame pixel order
//      168     4  CRC-32 (IEEE 802.3) over bytes [0, 168)
//
// At 30 fps for two eyes the link carries 172 * 60 = 10,320 bytes/s.
inline constexpr std::size_t kMessageSize = 172;
inline constexpr std::uint8_t kProtocolVersion = 0x01;
inline constexpr std::uint8_t kMagic0 = 0x48;
inline constexpr std::uint8_t kMagic1 = 0x52;

struct DriverMessage {
    std::uint8_t eye_id = 0;
    std::uint32_t sequence = 0;
    LedFrame frame;

    friend bool operator==(const DriverMessage&, const DriverMessage&) = default;
};

using Bytes = std::vector<std::uint8_t>;

std::uint32_t crc32(std::span<const std::uint8_t> data, std::uint32_t crc = 0) noexcept;

Bytes encode(const DriverMessage& msg);
void encode_into(const DriverMessage& msg, std::span<std::uint8_t, kMessageSize> out);

enum class DecodeStatus { Ok, Truncated, TooLong, BadMagic, BadVersion, BadCrc, BadEye };

/// Non-throwing decode; `out` is written only on Ok.
DecodeStatus try_decode(std::span<const std::uint8_t> bytes, DriverMessage& out) noexcept;

/// Throws TruncationError (short input), FormatError (length, magic, version,
/// eye id) or CorruptionError (CRC mismatch).
DriverMessage decode(std::span<const std::uint8_t> bytes);

// Reassembles messages from an arbitrarily chunked byte stream. Garbage is
// skipped by hunting for the next magic; corrupt candidates are dropped.
class StreamDecoder {
public:
    std::vector<DriverMessage> feed(std::span<const std::uint8_t> chunk);

    std::uint64_t dropped_bytes() const noexcept { return dropped_bytes_; }
    std::uint64_t corrupt_messages() const noexcept { return corrupt_; }

private:
    Bytes buffer_;
    std::uint64_t dropped_bytes_ = 0;
    std::uint64_t corrupt_ = 0;
};

// Frame log (.hrlog): 8-byte header "HRLOG\0\0\1", then per record an 8-byte
// big-endian millisecond timestamp followed by one encoded message.
inline constexpr std::array<std::uint8_t, 8> kFrameLogHeader{'H', 'R', 'L', 'O', 'G', 0, 0, 1};
inline constexpr std::size_t kFrameLogRecordSize = 8 + kMessageSize;

struct LogRecord {
    std::uint64_t timestamp_ms = 0;
    DriverMessage message;

    friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct FrameLog {
    std::vector<LogRecord> records;
    bool truncated = false;  // trailing partial record was discarded
};

/// Throws DomainError if timestamps decrease or a per-eye sequence goes
/// backwards.
Bytes framelog_write(std::span<const LogRecord> records);

/// Throws FormatError on a bad header; a cut-off tail sets `truncated`.
FrameLog framelog_read(std::span<const std::uint8_t> bytes);

FrameLog framelog_load(const std::string& path);

// Appends records to an output stream as they are produced.
class FrameLogWriter {
public:
    explicit FrameLogWriter(std::ostream& out);

    void append(const LogRecord& record);
    std::size_t count() const noexcept { return count_; }

private:
    std::ostream* out_;
    std::size_t count_ = 0;
    std::optional<std::uint64_t> last_timestamp_;
    std::array<std::optional<std::uint32_t>, 2> last_sequence_;
};

}  // namespace hreye

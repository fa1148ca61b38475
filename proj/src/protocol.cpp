#include "hreye/protocol.hpp"

#include "hreye/error.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace hreye {

namespace {

// Slicing-by-8 tables: kCrcTables[0] is the classic byte table.
constexpr std::array<std::array<std::uint32_t, 256>, 8> make_crc_tables() {
    std::array<std::array<std::uint32_t, 256>, 8> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        }
        t[0][i] = c;
    }
    for (std::uint32_t i = 0; i < 256; ++i) {
        for (std::size_t k = 1; k < 8; ++k) {
            t[k][i] = (t[k - 1][i] >> 8) ^ t[0][t[k - 1][i] & 0xFFu];
        }
    }
    return t;
}

constexpr auto kCrcTables = make_crc_tables();

void put_u32(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v >> 24);
    p[1] = static_cast<std::uint8_t>(v >> 16);
    p[2] = static_cast<std::uint8_t>(v >> 8);
    p[3] = static_cast<std::uint8_t>(v);
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) | p[3];
}

void put_u64(std::uint8_t* p, std::uint64_t v) {
    put_u32(p, static_cast<std::uint32_t>(v >> 32));
    put_u32(p + 4, static_cast<std::uint32_t>(v));
}

std::uint64_t get_u64(const std::uint8_t* p) {
    return (std::uint64_t(get_u32(p)) << 32) | get_u32(p + 4);
}

constexpr std::size_t kPayloadOffset = 8;
constexpr std::size_t kCrcOffset = kMessageSize - 4;

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> data, std::uint32_t crc) noexcept {
    const auto& t = kCrcTables;
    crc = ~crc;
    const std::uint8_t* p = data.data();
    std::size_t n = data.size();
    for (; n >= 8; n -= 8, p += 8) {
        const std::uint32_t lo = crc ^ (std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
                                         std::uint32_t(p[3]) << 24);
        crc = t[7][lo & 0xFFu] ^ t[6][(lo >> 8) & 0xFFu] ^ t[5][(lo >> 16) & 0xFFu] ^ t[4][lo >> 24] ^ t[3][p[4]] ^
              t[2][p[5]] ^ t[1][p[6]] ^ t[0][p[7]];
    }
    for (; n > 0; --n, ++p) {
        crc = t[0][(crc ^ *p) & 0xFFu] ^ (crc >> 8);
    }
    return ~crc;
}

void encode_into(const DriverMessage& msg, std::span<std::uint8_t, kMessageSize> out) {
    if (msg.eye_id > 1) {
        throw DomainError("eye id must be 0 or 1");
    }
    out[0] = kMagic0;
    out[1] = kMagic1;
    out[2] = kProtocolVersion;
    out[3] = msg.eye_id;
    put_u32(&out[4], msg.sequence);
    std::size_t pos = kPayloadOffset;
    for (const auto& px : msg.frame) {
        out[pos++] = px.r;
        out[pos++] = px.g;
        out[pos++] = px.b;
        out[pos++] = px.a;
    }
    put_u32(&out[kCrcOffset], crc32(out.first(kCrcOffset)));
}

Bytes encode(const DriverMessage& msg) {
    Bytes out(kMessageSize);
    encode_into(msg, std::span<std::uint8_t, kMessageSize>(out.data(), kMessageSize));
    return out;
}

DecodeStatus try_decode(std::span<const std::uint8_t> bytes, DriverMessage& out) noexcept {
    if (bytes.size() < kMessageSize) return DecodeStatus::Truncated;
    if (bytes.size() > kMessageSize) return DecodeStatus::TooLong;
    if (bytes[0] != kMagic0 || bytes[1] != kMagic1) return DecodeStatus::BadMagic;
    if (bytes[2] != kProtocolVersion) return DecodeStatus::BadVersion;
    if (crc32(bytes.first(kCrcOffset)) != get_u32(&bytes[kCrcOffset])) return DecodeStatus::BadCrc;
    if (bytes[3] > 1) return DecodeStatus::BadEye;
    out.eye_id = bytes[3];
    out.sequence = get_u32(&bytes[4]);
    std::size_t pos = kPayloadOffset;
    for (auto& px : out.frame) {
        px = {bytes[pos], bytes[pos + 1], bytes[pos + 2], bytes[pos + 3]};
        pos += 4;
    }
    return DecodeStatus::Ok;
}

DriverMessage decode(std::span<const std::uint8_t> bytes) {
    DriverMessage msg;
    switch (try_decode(bytes, msg)) {
    case DecodeStatus::Ok:
        return msg;
    case DecodeStatus::Truncated:
        throw TruncationError("message needs " + std::to_string(kMessageSize) + " bytes, got " +
                              std::to_string(bytes.size()));
    case DecodeStatus::TooLong:
        throw FormatError("message longer than " + std::to_string(kMessageSize) + " bytes");
    case DecodeStatus::BadMagic:
        throw FormatError("bad magic");
    case DecodeStatus::BadVersion:
        throw FormatError("unsupported protocol version " + std::to_string(bytes[2]));
    case DecodeStatus::BadCrc:
        throw CorruptionError("CRC mismatch");
    case DecodeStatus::BadEye:
        throw FormatError("eye id must be 0 or 1");
    }
    throw FormatError("undecodable message");
}

std::vector<DriverMessage> StreamDecoder::feed(std::span<const std::uint8_t> chunk) {
    buffer_.insert(buffer_.end(), chunk.begin(), chunk.end());
    std::vector<DriverMessage> out;
    std::size_t pos = 0;
    while (buffer_.size() - pos >= 2) {
        if (buffer_[pos] != kMagic0 || buffer_[pos + 1] != kMagic1) {
            ++pos;
            ++dropped_bytes_;
            continue;
        }
        if (buffer_.size() - pos < kMessageSize) {
            break;
        }
        DriverMessage msg;
        if (try_decode(std::span(buffer_).subspan(pos, kMessageSize), msg) == DecodeStatus::Ok) {
            out.push_back(msg);
            pos += kMessageSize;
        } else {
            // Not a real frame boundary; resynchronize one byte later.
            ++corrupt_;
            ++pos;
            ++dropped_bytes_;
        }
    }
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos));
    return out;
}

FrameLogWriter::FrameLogWriter(std::ostream& out) : out_(&out) {
    out_->write(reinterpret_cast<const char*>(kFrameLogHeader.data()), kFrameLogHeader.size());
}

void FrameLogWriter::append(const LogRecord& record) {
    if (last_timestamp_ && record.timestamp_ms < *last_timestamp_) {
        throw DomainError("frame log timestamps must not decrease");
    }
    if (record.message.eye_id > 1) {
        throw DomainError("eye id must be 0 or 1");
    }
    auto& last_seq = last_sequence_[record.message.eye_id];
    if (last_seq && record.message.sequence < *last_seq) {
        throw DomainError("frame log sequences must not decrease per eye");
    }
    std::array<std::uint8_t, kFrameLogRecordSize> buf{};
    put_u64(buf.data(), record.timestamp_ms);
    encode_into(record.message, std::span<std::uint8_t, kMessageSize>(buf.data() + 8, kMessageSize));
    out_->write(reinterpret_cast<const char*>(buf.data()), buf.size());
    last_timestamp_ = record.timestamp_ms;
    last_seq = record.message.sequence;
    ++count_;
}

Bytes framelog_write(std::span<const LogRecord> records) {
    std::ostringstream out;
    FrameLogWriter writer(out);
    for (const auto& r : records) {
        writer.append(r);
    }
    const auto s = out.str();
    return Bytes(s.begin(), s.end());
}

FrameLog framelog_read(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFrameLogHeader.size() ||
        !std::equal(kFrameLogHeader.begin(), kFrameLogHeader.end(), bytes.begin())) {
        throw FormatError("not a frame log (bad header)");
    }
    FrameLog log;
    std::size_t pos = kFrameLogHeader.size();
    while (bytes.size() - pos >= kFrameLogRecordSize) {
        LogRecord r;
        r.timestamp_ms = get_u64(&bytes[pos]);
        r.message = decode(bytes.subspan(pos + 8, kMessageSize));
        log.records.push_back(r);
        pos += kFrameLogRecordSize;
    }
    log.truncated = pos != bytes.size();
    return log;
}

FrameLog framelog_load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw DataError("cannot read " + path);
    }
    Bytes bytes{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
    return framelog_read(bytes);
}

}  // namespace hreye

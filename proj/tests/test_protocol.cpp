#include "hreye/error.hpp"
#include "hreye/protocol.hpp"
#include "support.hpp"

#include <zlib.h>

#include <cstring>
#include <sstream>

using namespace hreye;

namespace {

std::uint32_t zlib_crc(std::span<const std::uint8_t> data) {
    return static_cast<std::uint32_t>(::crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

Bytes as_bytes(const std::string& s) {
    return Bytes(s.begin(), s.end());
}

}  // namespace

TEST_CASE("crc32 check value") {
    const auto v = as_bytes("123456789");
    CHECK(hreye::crc32(v) == 0xCBF43926u);
    CHECK(zlib_crc(v) == 0xCBF43926u);
    CHECK(hreye::crc32({}) == 0u);
}

TEST_CASE("crc32 agrees with zlib") {
    for (int i = 0; i < 500; ++i) {
        Bytes b(static_cast<std::size_t>(test::uniform_int(0, 400)));
        for (auto& x : b) x = static_cast<std::uint8_t>(test::uniform_int(0, 255));
        CHECK(hreye::crc32(b) == zlib_crc(b));
        // Incremental form.
        const auto cut = b.size() / 3;
        const auto first = hreye::crc32(std::span(b).first(cut));
        CHECK(hreye::crc32(std::span(b).subspan(cut), first) == zlib_crc(b));
    }
}

TEST_CASE("layout of a dark frame") {
    const auto bytes = encode({0, 0, blank_frame()});
    REQUIRE(bytes.size() == kMessageSize);
    const std::uint8_t head[] = {0x48, 0x52, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00};
    CHECK(std::memcmp(bytes.data(), head, 8) == 0);
    for (std::size_t i = 8; i < 168; ++i) CHECK(bytes[i] == 0);
    const auto crc = zlib_crc(std::span(bytes).first(168));
    CHECK(bytes[168] == static_cast<std::uint8_t>(crc >> 24));
    CHECK(bytes[169] == static_cast<std::uint8_t>(crc >> 16));
    CHECK(bytes[170] == static_cast<std::uint8_t>(crc >> 8));
    CHECK(bytes[171] == static_cast<std::uint8_t>(crc));
}

TEST_CASE("field encoding is big-endian in frame order") {
    LedFrame f;
    f[0] = {1, 2, 3, 4};
    f[39] = {5, 6, 7, 8};
    const auto bytes = encode({1, 0x01020304u, f});
    CHECK(bytes[3] == 1);
    CHECK(bytes[4] == 0x01);
    CHECK(bytes[7] == 0x04);
    CHECK(bytes[8] == 1);
    CHECK(bytes[11] == 4);
    CHECK(bytes[8 + 39 * 4] == 5);
    CHECK(bytes[8 + 39 * 4 + 3] == 8);
}

TEST_CASE("round trip") {
    for (int i = 0; i < 2000; ++i) {
        const auto m = test::random_message();
        const auto bytes = encode(m);
        CHECK(bytes.size() == kMessageSize);
        CHECK(decode(bytes) == m);
        CHECK(encode(decode(bytes)) == bytes);
    }
}

TEST_CASE("encode rejects unknown eyes") {
    CHECK_THROWS_AS(encode({2, 0, blank_frame()}), DomainError);
}

TEST_CASE("decode errors are distinguishable") {
    const auto good = encode(test::random_message());
    CHECK_THROWS_AS(decode({}), TruncationError);
    CHECK_THROWS_AS(decode(std::span(good).first(171)), TruncationError);
    Bytes longer = good;
    longer.push_back(0);
    CHECK_THROWS_AS(decode(longer), FormatError);

    auto bad_magic = good;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(decode(bad_magic), FormatError);
    auto bad_version = good;
    bad_version[2] = 2;
    CHECK_THROWS_AS(decode(bad_version), FormatError);
    auto corrupt = good;
    corrupt[100] ^= 0x10;
    CHECK_THROWS_AS(decode(corrupt), CorruptionError);

    // A well-formed message for eye 2 with a valid CRC is still rejected.
    auto eye2 = good;
    eye2[3] = 2;
    const auto crc = hreye::crc32(std::span(eye2).first(168));
    for (int i = 0; i < 4; ++i) eye2[168 + i] = static_cast<std::uint8_t>(crc >> (24 - 8 * i));
    CHECK_THROWS_AS(decode(eye2), FormatError);
}

TEST_CASE("try_decode reports the failure kind without throwing") {
    const auto msg = test::random_message();
    const auto good = encode(msg);
    DriverMessage out;
    CHECK(try_decode(good, out) == DecodeStatus::Ok);
    CHECK(out == msg);

    DriverMessage untouched;
    CHECK(try_decode(std::span(good).first(171), untouched) == DecodeStatus::Truncated);
    Bytes longer = good;
    longer.push_back(0);
    CHECK(try_decode(longer, untouched) == DecodeStatus::TooLong);
    auto bad = good;
    bad[1] = 'X';
    CHECK(try_decode(bad, untouched) == DecodeStatus::BadMagic);
    bad = good;
    bad[2] = 0;
    CHECK(try_decode(bad, untouched) == DecodeStatus::BadVersion);
    bad = good;
    bad[171] ^= 1;
    CHECK(try_decode(bad, untouched) == DecodeStatus::BadCrc);
    bad = good;
    bad[3] = 7;
    const auto crc = hreye::crc32(std::span(bad).first(168));
    for (int i = 0; i < 4; ++i) bad[168 + i] = static_cast<std::uint8_t>(crc >> (24 - 8 * i));
    CHECK(try_decode(bad, untouched) == DecodeStatus::BadEye);
    CHECK(untouched == DriverMessage{});
}

TEST_CASE("every single-byte corruption is detected") {
    for (int i = 0; i < 200; ++i) {
        const auto good = encode(test::random_message());
        for (std::size_t pos = 0; pos < kMessageSize; ++pos) {
            auto bad = good;
            bad[pos] ^= static_cast<std::uint8_t>(test::uniform_int(1, 255));
            CHECK_THROWS_AS(decode(bad), Error);
        }
    }
}

TEST_CASE("stream decoder reassembles arbitrary chunks") {
    std::vector<DriverMessage> sent;
    Bytes wire;
    for (int i = 0; i < 50; ++i) {
        sent.push_back(test::random_message());
        const auto b = encode(sent.back());
        wire.insert(wire.end(), b.begin(), b.end());
    }
    StreamDecoder dec;
    std::vector<DriverMessage> got;
    std::size_t pos = 0;
    while (pos < wire.size()) {
        const auto n = std::min<std::size_t>(wire.size() - pos, static_cast<std::size_t>(test::uniform_int(1, 400)));
        for (auto& m : dec.feed(std::span(wire).subspan(pos, n))) got.push_back(m);
        pos += n;
    }
    CHECK(got == sent);
    CHECK(dec.dropped_bytes() == 0);
}

TEST_CASE("stream decoder skips garbage and corrupt messages") {
    const auto a = test::random_message();
    const auto b = test::random_message();
    Bytes wire = {0x00, 0x48, 0x13, 0x52};
    auto ea = encode(a);
    ea[50] ^= 0xFF;
    wire.insert(wire.end(), ea.begin(), ea.end());
    const auto eb = encode(b);
    wire.insert(wire.end(), eb.begin(), eb.end());
    StreamDecoder dec;
    const auto got = dec.feed(wire);
    REQUIRE(got.size() == 1);
    CHECK(got[0] == b);
    CHECK(dec.corrupt_messages() >= 1);
    CHECK(dec.dropped_bytes() > 0);
}

TEST_CASE("frame log round trip") {
    std::vector<LogRecord> records;
    for (std::uint32_t i = 0; i < 3; ++i) records.push_back({i * 33ull, {0, i, test::random_frame()}});
    const auto bytes = framelog_write(records);
    CHECK(bytes.size() == 8 + 3 * kFrameLogRecordSize);
    CHECK(std::equal(kFrameLogHeader.begin(), kFrameLogHeader.end(), bytes.begin()));
    const auto log = framelog_read(bytes);
    CHECK(log.records == records);
    CHECK_FALSE(log.truncated);
}

TEST_CASE("empty frame log") {
    const auto bytes = framelog_write({});
    CHECK(bytes.size() == 8);
    const auto log = framelog_read(bytes);
    CHECK(log.records.empty());
    CHECK_FALSE(log.truncated);
}

TEST_CASE("truncated frame log keeps complete records") {
    std::vector<LogRecord> records;
    for (std::uint32_t i = 0; i < 3; ++i) records.push_back({i * 10ull, {1, i, test::random_frame()}});
    auto bytes = framelog_write(records);
    bytes.resize(bytes.size() - 50);
    const auto log = framelog_read(bytes);
    CHECK(log.truncated);
    REQUIRE(log.records.size() == 2);
    CHECK(log.records[1] == records[1]);
}

TEST_CASE("frame log errors") {
    CHECK_THROWS_AS(framelog_read(as_bytes("HRLOG\0\0\2")), FormatError);
    CHECK_THROWS_AS(framelog_read(as_bytes("nope")), FormatError);
    std::vector<LogRecord> backwards_time{{10, {0, 0, {}}}, {5, {0, 1, {}}}};
    CHECK_THROWS_AS(framelog_write(backwards_time), DomainError);
    std::vector<LogRecord> backwards_seq{{0, {0, 5, {}}}, {1, {0, 4, {}}}};
    CHECK_THROWS_AS(framelog_write(backwards_seq), DomainError);
    // Interleaved eyes keep independent counters.
    std::vector<LogRecord> interleaved{{0, {0, 5, {}}}, {0, {1, 0, {}}}, {33, {0, 6, {}}}, {33, {1, 1, {}}}};
    CHECK_NOTHROW(framelog_write(interleaved));
    auto corrupt = framelog_write(interleaved);
    corrupt[8 + 8 + 20] ^= 1;
    CHECK_THROWS_AS(framelog_read(corrupt), CorruptionError);
}

TEST_CASE("streaming writer matches batch writer") {
    std::vector<LogRecord> records;
    for (std::uint32_t i = 0; i < 10; ++i) records.push_back({i * 33ull, {static_cast<std::uint8_t>(i % 2), i / 2, test::random_frame()}});
    std::ostringstream out;
    FrameLogWriter w(out);
    for (const auto& r : records) w.append(r);
    CHECK(w.count() == 10);
    const auto s = out.str();
    CHECK(Bytes(s.begin(), s.end()) == framelog_write(records));
}

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bdns::cache {

// Standard DNS type codes; rtype 0 is reserved as the packed-region
// terminator inside a slot.
enum class RecordType : uint16_t { a = 1, ns = 2, aaaa = 28 };

constexpr uint16_t kClassIn = 1;

struct IpAddr {
    uint8_t family = 0;  // 4 or 6
    std::array<uint8_t, 16> bytes{};

    size_t len() const { return family == 4 ? 4 : 16; }
    std::span<const uint8_t> view() const { return {bytes.data(), len()}; }

    static IpAddr v4(std::string_view dotted);
    static IpAddr v6(std::string_view text);
    static IpAddr parse(std::string_view text);  // auto-detect family
    static IpAddr from_bytes(std::span<const uint8_t> raw);
    std::string to_string() const;
    bool operator==(const IpAddr&) const = default;
};

// Compact cache record: 16-byte domain digest, type, class, absolute
// expiration (Unix milliseconds), rdata holding the answer address followed
// by the final authoritative server's address. 38 bytes for IPv4 pairs,
// 62 for IPv6; NS records carry the server address alone.
struct RecordWire {
    std::array<uint8_t, 16> digest{};
    uint16_t rtype = 0;
    uint16_t rclass = kClassIn;
    uint64_t expire_ts_ms = 0;
    std::vector<uint8_t> rdata;

    size_t wire_size() const { return kHeaderSize + rdata.size(); }
    static constexpr size_t kHeaderSize = 16 + 2 + 2 + 8 + 2;

    // split rdata back into (answer address, final-ANS address)
    std::optional<IpAddr> answer_addr() const;
    std::optional<IpAddr> ans_addr() const;

    bool operator==(const RecordWire&) const = default;
};

RecordWire encode_record(std::string_view domain, RecordType rtype, uint16_t rclass,
                         uint64_t expire_ts_ms, const std::optional<IpAddr>& answer_ip,
                         const IpAddr& ans_ip);

void append_record(std::vector<uint8_t>& out, const RecordWire& rec);
// Parses one record starting at `data`; returns the record and bytes consumed.
std::pair<RecordWire, size_t> parse_record(std::span<const uint8_t> data);

// Total number of record/slot decode calls since process start. The private
// query path must never move this counter; tests assert on it.
uint64_t record_decode_count();

}  // namespace bdns::cache

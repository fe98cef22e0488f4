#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdns/cache/record.hpp"

namespace bdns::dnswire {

enum class Rcode : uint8_t {
    noerror = 0,
    formerr = 1,
    servfail = 2,
    nxdomain = 3,
    notimp = 4,
    refused = 5,
};

inline constexpr uint16_t kTypeA = 1;
inline constexpr uint16_t kTypeNs = 2;
inline constexpr uint16_t kTypeAaaa = 28;
inline constexpr uint16_t kTypeOpt = 41;
inline constexpr uint16_t kClassIn = 1;

// EDNS(0) option carrying the resolver address a final ANS should populate,
// plus the cache-miss challenge flag. Payload layout:
//   family: u8 (1 = IPv4, 2 = IPv6)
//   flags:  u8 (bit 0 = challenge / proof required)
//   address: 4 or 16 bytes (always the full address)
inline constexpr uint16_t kEdnsPrOptionCode = 65001;
inline constexpr uint8_t kEdnsPrChallengeFlag = 0x01;

struct EdnsPr {
    cache::IpAddr rer_address;
    bool challenge = false;

    uint8_t family_code() const { return rer_address.family == 4 ? 1 : 2; }
};

struct Question {
    std::string qname;
    uint16_t qtype = kTypeA;
    uint16_t qclass = kClassIn;
};

struct ResourceRecord {
    std::string name;
    uint16_t rtype = 0;
    uint16_t rclass = kClassIn;
    uint32_t ttl = 0;
    std::vector<uint8_t> rdata;

    static ResourceRecord address(const std::string& name, const cache::IpAddr& ip,
                                  uint32_t ttl);
    static ResourceRecord ns(const std::string& zone, const std::string& ns_name,
                             uint32_t ttl);
    std::string rdata_as_name() const;  // for NS rdata
    cache::IpAddr rdata_as_ip() const;  // for A/AAAA rdata
};

struct Message {
    uint16_t id = 0;
    bool qr = false;  // response flag
    uint8_t opcode = 0;
    bool aa = false, tc = false, rd = false, ra = false;
    Rcode rcode = Rcode::noerror;

    std::vector<Question> questions;
    std::vector<ResourceRecord> answers;
    std::vector<ResourceRecord> authorities;
    std::vector<ResourceRecord> additionals;  // OPT is handled separately

    bool has_edns = false;
    uint16_t edns_udp_size = 1232;
    std::optional<EdnsPr> edns_pr;
    // a present-but-unparseable EDNS-PR option; the server answers but must
    // not populate
    bool edns_pr_malformed = false;

    std::vector<uint8_t> encode() const;
    static Message parse(std::span<const uint8_t> data);
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bdns::dnswire

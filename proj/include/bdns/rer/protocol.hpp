#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdns/cache/record.hpp"
#include "bdns/crypto.hpp"

namespace bdns::rer {

// One verified authoritative server: its registry identity, signature
// verification key and populate endpoint.
struct AnsEntry {
    std::string identity;
    std::array<uint8_t, 32> verify_key{};
    std::string endpoint;
};

// zone -> verified ANS; lookups take the longest matching label suffix
class TrustRegistry {
public:
    void add(const std::string& zone, AnsEntry entry);
    const AnsEntry* lookup_zone(std::string_view domain) const;
    const AnsEntry* find_identity(std::string_view identity) const;
    size_t size() const { return zones_.size(); }

private:
    std::map<std::string, AnsEntry, std::less<>> zones_;
};

// does `domain` fall under `zone` on a label boundary
bool zone_contains(std::string_view zone, std::string_view domain);

struct PopulateRecord {
    std::string domain;
    uint16_t rtype = 0;
    uint16_t rclass = cache::kClassIn;
    uint64_t expire_ts_ms = 0;
    std::optional<cache::IpAddr> answer;
    cache::IpAddr ans_addr;
};

// Signed cache-population message from a final ANS.
struct PopulateMsg {
    std::string sender;  // registry identity
    uint64_t sent_ts_ms = 0;
    std::vector<PopulateRecord> records;
    crypto::Signature signature{};

    std::vector<uint8_t> canonical_bytes() const;  // everything but the signature
    std::vector<uint8_t> serialize() const;
    static PopulateMsg deserialize(std::span<const uint8_t> data);
};

// Resolver-signed transcript binding (client_ip, timestamp, digest(q),
// digest(r)); the ANS later verifies it inside a cache-miss proof.
struct TranscriptSignature {
    std::array<uint8_t, 8> signer{};  // first 8 bytes of sha256(verify key)
    std::vector<uint8_t> message;
    crypto::Signature signature{};

    std::vector<uint8_t> serialize() const;
    static TranscriptSignature deserialize(std::span<const uint8_t> data);
};

std::vector<uint8_t> transcript_message(std::string_view client_ip, uint64_t timestamp_ms,
                                        const crypto::Sha256Digest& query_digest,
                                        const crypto::Sha256Digest& response_digest);

struct TranscriptFields {
    std::string client_ip;
    uint64_t timestamp_ms = 0;
    crypto::Sha256Digest query_digest{};
    crypto::Sha256Digest response_digest{};
};

TranscriptFields parse_transcript_message(std::span<const uint8_t> message);

bool verify_transcript(const std::array<uint8_t, 32>& verify_key,
                       const TranscriptSignature& sig);

}  // namespace bdns::rer

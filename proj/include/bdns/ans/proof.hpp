#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bdns/rer/protocol.hpp"

namespace bdns::ans {

// Cache-miss proof: the resolver-signed transcript plus the backup query key
// that lets the ANS decrypt it without learning the client's primary key.
struct MissProof {
    std::vector<uint8_t> query_bytes;
    std::vector<uint8_t> response_bytes;
    std::vector<uint8_t> backup_qk_bytes;
    rer::TranscriptSignature rer_sig;
    std::string client_ip;
    uint64_t timestamp_ms = 0;
    std::string domain;

    std::vector<uint8_t> serialize() const;
    static MissProof deserialize(std::span<const uint8_t> data);
};

enum class ProofVerdict {
    valid,
    malformed,
    bad_signature,  // transcript signature missing or not binding (ip, ts, q, r)
    stale,          // outside the freshness window
    wrong_index,    // q does not address index(domain)
    not_a_miss,     // the decrypted slot held a fresh record at the signed time
    no_pending,     // nothing was challenged for this sender
};

std::string_view to_string(ProofVerdict v);

}  // namespace bdns::ans

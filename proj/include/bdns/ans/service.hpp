#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "bdns/ans/proof.hpp"
#include "bdns/ans/scheduler.hpp"
#include "bdns/ans/zone.hpp"
#include "bdns/delay.hpp"
#include "bdns/dnswire/message.hpp"

namespace bdns::ans {

// A resolver this ANS is willing to populate: its transcript verification
// key and populate endpoint, keyed by the address clients name in EDNS-PR.
struct ResolverPeer {
    std::array<uint8_t, 32> verify_key{};
    std::string endpoint;
};

struct AnsConfig {
    std::string identity;                    // trust-registry identity
    cache::IpAddr public_addr;               // embedded as the final-ANS address
    DelayDistribution populate_delay = DelayDistribution::fixed(0);
    uint64_t proof_freshness_ms = 60'000;
    std::map<std::string, ResolverPeer> resolvers;  // EDNS-PR address -> peer
};

struct AnsStats {
    uint64_t queries_answered = 0;
    uint64_t queries_refused = 0;
    uint64_t challenges_issued = 0;
    uint64_t proofs_valid = 0;
    uint64_t proofs_invalid = 0;
    uint64_t populates_scheduled = 0;
    uint64_t populates_dispatched = 0;
    uint64_t populates_dropped = 0;
    uint64_t populates_withheld = 0;
    std::string to_json() const;
};

// Mock authoritative server: authoritative answers, EDNS-PR driven cache
// population with sampled delays, frequency-triggered cache-miss challenges
// and the per-(resolver, domain, TTL-window) reflection cap.
class AnsService {
public:
    AnsService(AnsConfig cfg, crypto::SigningKey signing_key, ZoneData zone,
               PopulateScheduler::Transport transport);

    const AnsConfig& config() const { return cfg_; }
    const std::array<uint8_t, 32>& verify_key() const { return signing_key_.verify; }

    dnswire::Message serve_query(const dnswire::Message& query, const std::string& sender_ip,
                                 uint64_t now_ms);

    ProofVerdict handle_proof(const MissProof& proof, const std::string& sender_ip,
                              uint64_t now_ms);

    // reflection guard decision for (resolver, domain) at `now`
    bool populate_allowed(const std::string& rer_addr, const std::string& domain,
                          uint64_t now_ms) const;

    AnsStats stats() const;
    void drain_scheduler() { scheduler_.drain(); }
    size_t pending_populates() const { return scheduler_.pending(); }

private:
    struct LedgerEntry {
        uint64_t populated_at_ms = 0;
        uint64_t ttl_ms = 0;
    };
    struct PendingChallenge {
        std::string domain;
        uint16_t rtype = 0;
        std::string rer_addr;
        uint64_t issued_at_ms = 0;
        ZoneRecord record;
    };

    rer::PopulateMsg build_populate(const ZoneRecord& rec, uint64_t now_ms) const;
    void dispatch_populate(const std::string& rer_addr, const ZoneRecord& rec,
                           uint64_t now_ms);

    AnsConfig cfg_;
    crypto::SigningKey signing_key_;
    ZoneData zone_;
    PopulateScheduler scheduler_;
    mutable crypto::SecureRng rng_;

    mutable std::mutex mu_;  // ledger + pending proofs
    std::map<std::pair<std::string, std::string>, LedgerEntry> ledger_;
    std::map<std::string, PendingChallenge> pending_;  // keyed by sender address

    std::atomic<uint64_t> queries_answered_{0};
    std::atomic<uint64_t> queries_refused_{0};
    std::atomic<uint64_t> challenges_issued_{0};
    std::atomic<uint64_t> proofs_valid_{0};
    std::atomic<uint64_t> proofs_invalid_{0};
    std::atomic<uint64_t> populates_scheduled_{0};
    std::atomic<uint64_t> populates_withheld_{0};
};

}  // namespace bdns::ans

#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "bdns/ans/proof.hpp"
#include "bdns/cache/store.hpp"
#include "bdns/dnswire/message.hpp"
#include "bdns/net/http.hpp"
#include "bdns/pir/engine.hpp"
#include "bdns/rer/protocol.hpp"

namespace bdns::client {

struct ClientConfig {
    std::string resolver_url;
    // identity address of the resolver, carried in EDNS-PR so final ANSes
    // know whose cache to populate
    std::string resolver_addr = "127.0.0.1";
    std::string root_url;
    std::string tld_url;
    // identity address -> DoH endpoint for final ANSes
    std::map<std::string, std::string> ans_endpoints;
    size_t backup_pool = 2;
    size_t transcript_ring = 128;

    // per-link injected latencies (harness shim)
    std::optional<DelayDistribution> resolver_delay;
    std::optional<DelayDistribution> root_delay;
    std::optional<DelayDistribution> tld_delay;
    std::optional<DelayDistribution> final_delay;

    std::string to_json() const;
    static ClientConfig from_json(const std::string& text);
};

enum class ResolutionSource { pir_hit, shortcut_ans, full_iterative };
std::string_view to_string(ResolutionSource s);

struct ResolutionOutcome {
    ResolutionSource source = ResolutionSource::pir_hit;
    cache::FindStatus cache_status = cache::FindStatus::absent;
    std::optional<cache::IpAddr> answer;
    uint64_t expire_ts_ms = 0;
    double latency_ms = 0;
    bool challenged = false;
    std::string proof_verdict;  // set when a challenge was handled
    std::string error;          // nonempty when resolution failed
    uint32_t root_queries = 0, tld_queries = 0, final_queries = 0;

    bool ok() const { return error.empty() && answer.has_value(); }
    std::string to_json_line(const std::string& domain, uint64_t ts_ms) const;
};

struct Transcript {
    std::vector<uint8_t> query_bytes;
    std::vector<uint8_t> response_bytes;
    rer::TranscriptSignature signature;
    uint64_t timestamp_ms = 0;
    std::string domain;
};

// Local stub resolver: PIR queries against the blind resolver, shortcut or
// full iterative lookups with EDNS-PR on misses, challenge handling with
// backup key pairs.
class ClientProxy {
public:
    explicit ClientProxy(ClientConfig cfg);

    // fetches the resolver config, generates and registers the primary and
    // backup key pairs
    void init();

    ResolutionOutcome resolve(const std::string& domain, uint16_t rtype, uint64_t now_ms);

    const pir::LweParams& params() const { return params_; }
    const std::string& client_token() const { return primary_.token; }
    size_t backup_pool_size() const;
    // digests of the pooled backup secrets; registration tokens cannot tell
    // key pairs apart (identical public material maps to one client id), so
    // rotation is observed through these
    std::vector<std::string> backup_fingerprints() const;

    std::vector<Transcript> transcripts() const;
    uint64_t challenges_handled() const { return challenges_handled_; }

private:
    struct KeyPair {
        pir::QueryKey qk;
        pir::PublicKey pk;
        std::vector<uint8_t> pk_bytes;
        std::string token;
    };

    struct RerReply {
        pir::PirResponse response;
        std::vector<uint8_t> response_bytes;
        rer::TranscriptSignature signature;
    };

    KeyPair make_registered_pair();
    RerReply rer_query(const KeyPair& pair, std::string_view domain, uint64_t idx,
                       std::vector<uint8_t>* query_bytes_out);
    dnswire::Message ans_query(net::HttpChannel& channel, const std::string& qname,
                               uint16_t qtype, bool attach_pr, ResolutionOutcome& outcome,
                               uint64_t now_ms);
    std::string handle_challenge(const std::string& domain, uint16_t rtype,
                                 net::HttpChannel& channel);
    ResolutionOutcome full_iterative(const std::string& domain, uint16_t rtype,
                                     uint64_t now_ms, ResolutionOutcome outcome);
    net::HttpChannel& ans_channel(const std::string& identity_addr);
    void record_transcript(Transcript t);

    ClientConfig cfg_;
    pir::LweParams params_;
    std::array<uint8_t, 32> resolver_verify_key_{};

    crypto::SecureRng rng_;
    KeyPair primary_;
    mutable std::mutex keys_mu_;
    std::deque<KeyPair> backups_;

    std::unique_ptr<net::HttpChannel> resolver_;
    std::unique_ptr<net::HttpChannel> root_;
    std::unique_ptr<net::HttpChannel> tld_;
    std::map<std::string, std::unique_ptr<net::HttpChannel>> finals_;
    std::mutex channels_mu_;

    mutable std::mutex ring_mu_;
    std::deque<Transcript> ring_;
    uint64_t challenges_handled_ = 0;
};

}  // namespace bdns::client

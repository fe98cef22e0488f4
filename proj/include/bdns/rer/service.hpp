#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>

#include "bdns/cache/store.hpp"
#include "bdns/histogram.hpp"
#include "bdns/pir/engine.hpp"
#include "bdns/rer/protocol.hpp"

namespace bdns::rer {

struct RerConfig {
    cache::CacheConfig cache;
    uint32_t dims = 1;
    std::optional<uint32_t> lattice_n;  // override the default dimension
    std::optional<uint32_t> q_bits;     // override the ciphertext modulus width
    uint32_t max_inflight_queries = 4;  // bounded admission; overflow is signalled
    uint32_t retry_after_ms = 250;
};

// Immutable view the query workers run on; populate builds a successor and
// swaps it in atomically. Readers never block writers.
struct Snapshot {
    uint64_t version = 0;
    pir::EncodedCache encoded;
    std::shared_ptr<const cache::PlainCache> plain;  // populate path and tests only
};

class OverloadError : public std::runtime_error {
public:
    explicit OverloadError(uint32_t retry_after_ms)
        : std::runtime_error("query queue full"), retry_after_ms(retry_after_ms) {}
    uint32_t retry_after_ms;
};

class UnknownClientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParamsMismatchError : public std::runtime_error {
public:
    explicit ParamsMismatchError(std::string advertised)
        : std::runtime_error("public key parameters do not match the advertised config"),
          advertised_params_json(std::move(advertised)) {}
    std::string advertised_params_json;
};

struct QueryResult {
    std::vector<uint8_t> response_bytes;
    TranscriptSignature transcript;
};

struct PopulateOutcome {
    bool accepted = false;
    std::string reason;  // empty when accepted
    uint64_t snapshot_version = 0;
};

struct RerStats {
    uint64_t registrations = 0;
    uint64_t queries_served = 0;
    uint64_t queries_overloaded = 0;
    uint64_t populates_accepted = 0;
    uint64_t populates_rejected = 0;
    uint64_t snapshot_version = 0;
    uint64_t restart_count = 0;
    double answer_mean_us = 0;
    double populate_mean_us = 0;
    std::string to_json() const;
};

// The blind recursive resolver. handle_query lives in its own translation
// unit that the blindness audit inspects: the private path works purely on
// opaque slots and never decodes records.
class RerService {
public:
    RerService(RerConfig cfg, crypto::SigningKey signing_key, TrustRegistry registry,
               std::string state_path = {});

    const pir::LweParams& params() const { return params_; }
    const RerConfig& config() const { return cfg_; }
    const std::array<uint8_t, 32>& verify_key() const { return signing_key_.verify; }
    std::string config_json() const;

    // returns the stable 16-byte client token (hex)
    std::string register_client(std::span<const uint8_t> public_key_bytes);
    bool is_registered(const std::string& client_token) const;

    QueryResult handle_query(const std::string& client_token,
                             std::span<const uint8_t> query_bytes,
                             const std::string& client_ip, uint64_t now_ms);

    PopulateOutcome apply_populate(std::span<const uint8_t> msg_bytes, uint64_t now_ms);

    RerStats stats() const;
    std::shared_ptr<const Snapshot> snapshot() const;

private:
    void swap_snapshot(std::shared_ptr<const Snapshot> next);

    RerConfig cfg_;
    pir::LweParams params_;
    crypto::SigningKey signing_key_;
    std::array<uint8_t, 8> signer_id_{};
    TrustRegistry registry_;

    mutable std::mutex snap_mu_;
    std::shared_ptr<const Snapshot> snap_;
    std::mutex writer_mu_;  // single-writer populate path

    mutable std::mutex clients_mu_;
    std::map<std::string, pir::PublicKey> clients_;

    std::counting_semaphore<1024> admission_;

    std::atomic<uint64_t> registrations_{0};
    std::atomic<uint64_t> queries_served_{0};
    std::atomic<uint64_t> queries_overloaded_{0};
    std::atomic<uint64_t> populates_accepted_{0};
    std::atomic<uint64_t> populates_rejected_{0};
    uint64_t restart_count_ = 0;
    LatencyHistogram answer_hist_;
    LatencyHistogram populate_hist_;
};

}  // namespace bdns::rer

#pragma once

#include <cstdint>
#include <vector>

namespace bdns::analytics {

// Reflection-attack model: attackers claim cache misses so the authoritative
// tier reflects populate messages at the resolver. With the defense on, each
// (domain, TTL window) admits at most one unproven populate.
struct ReflectionConfig {
    uint32_t n_attackers = 1;
    double attacker_bw_gbps = 1.0;
    std::vector<uint32_t> domain_ttls_s;     // one entry per cached domain
    uint64_t populate_size_bytes = 16 * 1024;
    uint64_t request_size_bytes = 1024;      // attacker-side cost per fake miss
    double coverage = 1.0;                   // leading fraction of domains attacked
    bool defense_on = false;
    uint32_t horizon_s = 60;
};

struct ReflectionReport {
    std::vector<uint64_t> reflected_bytes_per_s;  // horizon_s entries
    std::vector<uint64_t> populates_per_domain;
    uint64_t total_reflected_bytes = 0;

    // total reflected bytes inside [start_s, start_s + window_s)
    uint64_t window_bytes(uint32_t start_s, uint32_t window_s) const;
};

ReflectionReport reflection_sim(const ReflectionConfig& cfg);

}  // namespace bdns::analytics

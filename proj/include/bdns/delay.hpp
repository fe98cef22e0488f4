#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "bdns/crypto.hpp"

namespace bdns {

// Discrete delay distribution over integer milliseconds, shared by the
// populate scheduler, the latency-injection shim and the entropy model.
struct DelayDistribution {
    enum class Kind { fixed, uniform, geometric };

    Kind kind = Kind::fixed;
    uint64_t fixed_ms = 0;
    uint64_t lo_ms = 0, hi_ms = 0;  // uniform, both ends inclusive
    double geom_p = 1.0;            // success probability, support k >= 1

    static DelayDistribution fixed(uint64_t ms);
    static DelayDistribution uniform(uint64_t lo_ms, uint64_t hi_ms);
    static DelayDistribution geometric(double p);

    uint64_t sample(crypto::SecureRng& rng) const;
    double mean() const;
    double pmf(uint64_t k_ms) const;
    // total probability mass at or beyond k_ms
    double tail_mass(uint64_t k_ms) const;

    // "fixed:5" | "uniform:0:62" | "geometric:0.0323"
    static DelayDistribution parse(std::string_view text);
    std::string to_string() const;
};

}  // namespace bdns

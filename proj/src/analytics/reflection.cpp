#include "bdns/analytics/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bdns::analytics {

uint64_t ReflectionReport::window_bytes(uint32_t start_s, uint32_t window_s) const {
    uint64_t acc = 0;
    for (uint32_t t = start_s; t < start_s + window_s && t < reflected_bytes_per_s.size(); ++t)
        acc += reflected_bytes_per_s[t];
    return acc;
}

ReflectionReport reflection_sim(const ReflectionConfig& cfg) {
    if (cfg.domain_ttls_s.empty()) throw std::invalid_argument("domain set is empty");
    if (cfg.coverage <= 0 || cfg.coverage > 1)
        throw std::invalid_argument("coverage must be in (0, 1]");

    const size_t n_domains = cfg.domain_ttls_s.size();
    const size_t targeted =
        std::max<size_t>(1, static_cast<size_t>(std::floor(cfg.coverage * n_domains)));
    const uint64_t requests_per_attacker_s = static_cast<uint64_t>(
        cfg.attacker_bw_gbps * 1e9 / 8.0 / static_cast<double>(cfg.request_size_bytes));

    ReflectionReport rep;
    rep.reflected_bytes_per_s.assign(cfg.horizon_s, 0);
    rep.populates_per_domain.assign(n_domains, 0);

    // next second at which a populate for domain d is admitted without proof
    std::vector<uint64_t> window_open(n_domains, 0);

    for (uint32_t t = 0; t < cfg.horizon_s; ++t) {
        if (!cfg.defense_on) {
            // every fake miss reflects one populate; requests spread over the
            // targeted domains round-robin
            uint64_t requests = requests_per_attacker_s * cfg.n_attackers;
            rep.reflected_bytes_per_s[t] = requests * cfg.populate_size_bytes;
            for (uint64_t r = 0; r < std::min<uint64_t>(requests, targeted); ++r)
                ++rep.populates_per_domain[r % targeted];
            continue;
        }
        // defense on: the request volume is irrelevant beyond touching each
        // targeted domain at least once per second
        uint64_t budget = requests_per_attacker_s * cfg.n_attackers;
        for (size_t d = 0; d < targeted && budget > 0; ++d, --budget) {
            if (window_open[d] <= t) {
                window_open[d] = t + cfg.domain_ttls_s[d];
                rep.reflected_bytes_per_s[t] += cfg.populate_size_bytes;
                ++rep.populates_per_domain[d];
            }
        }
    }
    for (uint64_t b : rep.reflected_bytes_per_s) rep.total_reflected_bytes += b;
    return rep;
}

}  // namespace bdns::analytics

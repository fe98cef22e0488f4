#pragma once

#include <cstdint>
#include <vector>

#include "bdns/delay.hpp"

namespace bdns::analytics {

// Timing-attack scenario: queries finish every delta_ms; a populate arrives
// s_ms after the latest query; the resolver tries to attribute it to one of
// the candidate queries i >= 0 whose delay would have been s + i*delta.
struct EntropyScenario {
    uint64_t delta_ms = 31;
    DelayDistribution dist = DelayDistribution::uniform(0, 62);
    uint64_t s_ms = 1;          // in [0, delta_ms)
    double tail_epsilon = 1e-9;
    double miss_rate = 1.0;     // scales every candidate weight; cancels out
};

struct EntropyResult {
    double nats = 0.0;
    // set when the distribution's support misses every candidate offset
    bool degenerate = false;
};

// attribution threshold: two equally likely candidates
inline constexpr double kEntropyThreshold = 0.6931471805599453;  // ln 2

EntropyResult entropy(const EntropyScenario& scenario);

// Average attribution entropy across every arrival offset s in [0, delta).
double mean_entropy_over_s(const EntropyScenario& base);

enum class SweepAxis { arrival_offset, mean_delay, query_interval };

struct SweepPoint {
    double x = 0;
    double entropy_nats = 0;
};

// arrival_offset: entropy(s) for each s value, holding the base distribution.
// mean_delay: refit the distribution family to each target mean, report the
//             s-averaged entropy.
// query_interval: set delta to each value with E[X] = delta, report the
//             s-averaged entropy.
std::vector<SweepPoint> entropy_sweep(SweepAxis axis, const std::vector<double>& values,
                                      const EntropyScenario& base);

// Refit a distribution of the same family so its mean equals `mean_ms`.
DelayDistribution with_mean(const DelayDistribution& family, double mean_ms);

}  // namespace bdns::analytics

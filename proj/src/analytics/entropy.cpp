#include "bdns/analytics/entropy.hpp"

#include <cmath>
#include <stdexcept>

namespace bdns::analytics {

EntropyResult entropy(const EntropyScenario& sc) {
    if (sc.delta_ms == 0) throw std::invalid_argument("delta must be positive");
    if (sc.s_ms >= sc.delta_ms) throw std::invalid_argument("s must lie in [0, delta)");
    if (!(sc.tail_epsilon > 0)) throw std::invalid_argument("tail_epsilon must be positive");

    std::vector<double> weights;
    for (uint64_t i = 0;; ++i) {
        uint64_t k = sc.s_ms + i * sc.delta_ms;
        if (sc.dist.tail_mass(k) < sc.tail_epsilon) break;
        weights.push_back(sc.miss_rate * sc.dist.pmf(k));
        if (i > 10'000'000) throw std::runtime_error("entropy sum did not converge");
    }

    double total = 0;
    for (double w : weights) total += w;
    if (total <= 0.0) return {0.0, true};

    double h = 0;
    for (double w : weights) {
        if (w <= 0.0) continue;
        double p = w / total;
        h -= p * std::log(p);
    }
    return {h, false};
}

double mean_entropy_over_s(const EntropyScenario& base) {
    double acc = 0;
    for (uint64_t s = 0; s < base.delta_ms; ++s) {
        EntropyScenario sc = base;
        sc.s_ms = s;
        acc += entropy(sc).nats;
    }
    return acc / static_cast<double>(base.delta_ms);
}

DelayDistribution with_mean(const DelayDistribution& family, double mean_ms) {
    if (!(mean_ms > 0)) throw std::invalid_argument("mean must be positive");
    switch (family.kind) {
        case DelayDistribution::Kind::fixed:
            return DelayDistribution::fixed(static_cast<uint64_t>(std::llround(mean_ms)));
        case DelayDistribution::Kind::uniform:
            return DelayDistribution::uniform(
                0, static_cast<uint64_t>(std::llround(2.0 * mean_ms)));
        case DelayDistribution::Kind::geometric:
            return DelayDistribution::geometric(std::min(1.0, 1.0 / mean_ms));
    }
    throw std::logic_error("unreachable");
}

std::vector<SweepPoint> entropy_sweep(SweepAxis axis, const std::vector<double>& values,
                                      const EntropyScenario& base) {
    std::vector<SweepPoint> out;
    out.reserve(values.size());
    for (double x : values) {
        EntropyScenario sc = base;
        switch (axis) {
            case SweepAxis::arrival_offset:
                sc.s_ms = static_cast<uint64_t>(std::llround(x));
                out.push_back({x, entropy(sc).nats});
                continue;
            case SweepAxis::mean_delay:
                sc.dist = with_mean(base.dist, x);
                break;
            case SweepAxis::query_interval:
                sc.delta_ms = static_cast<uint64_t>(std::llround(x));
                sc.dist = with_mean(base.dist, x);
                break;
        }
        out.push_back({x, mean_entropy_over_s(sc)});
    }
    return out;
}

}  // namespace bdns::analytics

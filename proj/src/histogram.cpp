#include "bdns/histogram.hpp"

#include <nlohmann/json.hpp>

namespace bdns {

std::string LatencyHistogram::to_json() const {
    nlohmann::json buckets = nlohmann::json::array();
    for (size_t i = 0; i < kBuckets; ++i) {
        uint64_t c = bucket(i);
        if (c == 0) continue;
        buckets.push_back({{"le_us", (uint64_t{1} << i) - 1}, {"count", c}});
    }
    return nlohmann::json{{"count", count()}, {"mean_us", mean_us()}, {"buckets", buckets}}
        .dump();
}

}  // namespace bdns

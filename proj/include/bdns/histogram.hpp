#pragma once

#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <string>

namespace bdns {

// Lock-free log2-bucketed latency histogram (microseconds).
class LatencyHistogram {
public:
    static constexpr size_t kBuckets = 26;  // 1us .. ~33s

    void record(uint64_t us) {
        size_t b = us == 0 ? 0 : std::min<size_t>(kBuckets - 1, std::bit_width(us));
        buckets_[b].fetch_add(1, std::memory_order_relaxed);
        total_us_.fetch_add(us, std::memory_order_relaxed);
        count_.fetch_add(1, std::memory_order_relaxed);
    }

    uint64_t count() const { return count_.load(std::memory_order_relaxed); }
    double mean_us() const {
        uint64_t c = count();
        return c == 0 ? 0.0 : static_cast<double>(total_us_.load(std::memory_order_relaxed)) / c;
    }
    uint64_t bucket(size_t i) const { return buckets_[i].load(std::memory_order_relaxed); }

    std::string to_json() const;

private:
    std::array<std::atomic<uint64_t>, kBuckets> buckets_{};
    std::atomic<uint64_t> total_us_{0};
    std::atomic<uint64_t> count_{0};
};

}  // namespace bdns

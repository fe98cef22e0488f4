#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "bdns/rer/protocol.hpp"

namespace bdns::ans {

// Dispatches signed populate messages after their sampled delay. A single
// timer thread owns the queue; transport failures get bounded retries and
// then count as drops.
class PopulateScheduler {
public:
    using Transport = std::function<bool(const std::string& endpoint,
                                         const rer::PopulateMsg& msg)>;

    explicit PopulateScheduler(Transport transport, int max_retries = 3);
    ~PopulateScheduler();

    PopulateScheduler(const PopulateScheduler&) = delete;
    PopulateScheduler& operator=(const PopulateScheduler&) = delete;

    // returns the absolute dispatch time
    uint64_t schedule(std::string endpoint, rer::PopulateMsg msg, uint64_t due_ms);

    size_t pending() const;
    uint64_t dispatched() const { return dispatched_.load(); }
    uint64_t dropped() const { return dropped_.load(); }
    // block until every queued message has been attempted (tests)
    void drain();

private:
    struct Item {
        uint64_t due_ms;
        uint64_t seq;
        std::string endpoint;
        rer::PopulateMsg msg;
        bool operator>(const Item& o) const { return due_ms > o.due_ms; }
    };

    void run();

    Transport transport_;
    int max_retries_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::condition_variable idle_cv_;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue_;
    size_t in_flight_ = 0;
    uint64_t seq_ = 0;
    bool stop_ = false;
    std::atomic<uint64_t> dispatched_{0};
    std::atomic<uint64_t> dropped_{0};
    std::thread thread_;
};

uint64_t now_unix_ms();

}  // namespace bdns::ans

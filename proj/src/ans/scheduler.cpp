#include "bdns/ans/scheduler.hpp"

#include <chrono>

namespace bdns::ans {

uint64_t now_unix_ms() {
    return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                     std::chrono::system_clock::now().time_since_epoch())
                                     .count());
}

PopulateScheduler::PopulateScheduler(Transport transport, int max_retries)
    : transport_(std::move(transport)),
      max_retries_(max_retries),
      thread_([this] { run(); }) {}

PopulateScheduler::~PopulateScheduler() {
    {
        std::lock_guard lk(mu_);
        stop_ = true;
    }
    cv_.notify_all();
    thread_.join();
}

uint64_t PopulateScheduler::schedule(std::string endpoint, rer::PopulateMsg msg,
                                     uint64_t due_ms) {
    {
        std::lock_guard lk(mu_);
        queue_.push(Item{due_ms, seq_++, std::move(endpoint), std::move(msg)});
    }
    cv_.notify_all();
    return due_ms;
}

size_t PopulateScheduler::pending() const {
    std::lock_guard lk(mu_);
    return queue_.size() + in_flight_;
}

void PopulateScheduler::drain() {
    std::unique_lock lk(mu_);
    idle_cv_.wait(lk, [&] { return queue_.empty() && in_flight_ == 0; });
}

void PopulateScheduler::run() {
    std::unique_lock lk(mu_);
    while (true) {
        if (stop_) return;
        if (queue_.empty()) {
            cv_.wait(lk, [&] { return stop_ || !queue_.empty(); });
            continue;
        }
        uint64_t now = now_unix_ms();
        if (queue_.top().due_ms > now) {
            cv_.wait_for(lk, std::chrono::milliseconds(queue_.top().due_ms - now));
            continue;
        }
        Item item = queue_.top();
        queue_.pop();
        ++in_flight_;
        lk.unlock();

        bool ok = false;
        for (int attempt = 0; attempt <= max_retries_ && !ok; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
            try {
                ok = transport_(item.endpoint, item.msg);
            } catch (...) {
                ok = false;
            }
        }
        (ok ? dispatched_ : dropped_).fetch_add(1);

        lk.lock();
        --in_flight_;
        if (queue_.empty() && in_flight_ == 0) idle_cv_.notify_all();
    }
}

}  // namespace bdns::ans

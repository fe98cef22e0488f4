#include "bdns/net/http.hpp"

#include <thread>

namespace bdns::net {

HttpChannel::HttpChannel(std::string base_url, std::optional<DelayDistribution> injected_delay)
    : base_url_(std::move(base_url)), delay_(injected_delay), client_(base_url_) {
    client_.set_connection_timeout(5);
    client_.set_read_timeout(120);
    client_.set_keep_alive(true);
}

void HttpChannel::maybe_delay() {
    if (!delay_) return;
    uint64_t ms = delay_->sample(rng_);
    injected_total_ms_ += ms;
    if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

HttpResult HttpChannel::post(const std::string& path, std::string_view body,
                             const std::string& content_type,
                             const std::multimap<std::string, std::string>& headers) {
    std::lock_guard lk(mu_);
    maybe_delay();
    httplib::Headers h(headers.begin(), headers.end());
    auto res = client_.Post(path, h, body.data(), body.size(), content_type);
    if (!res) return {0, "transport error: " + httplib::to_string(res.error()), "", {}};
    HttpResult out{res->status, res->body, res->get_header_value("Content-Type"), {}};
    if (res->has_header("Retry-After-Ms"))
        out.retry_after_ms = static_cast<uint32_t>(
            std::stoul(res->get_header_value("Retry-After-Ms")));
    return out;
}

HttpResult HttpChannel::get(const std::string& path) {
    std::lock_guard lk(mu_);
    maybe_delay();
    auto res = client_.Get(path);
    if (!res) return {0, "transport error: " + httplib::to_string(res.error()), "", {}};
    return {res->status, res->body, res->get_header_value("Content-Type"), {}};
}

}  // namespace bdns::net

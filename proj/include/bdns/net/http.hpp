#pragma once

// Single include point for cpp-httplib so every translation unit agrees on
// the OpenSSL feature switch.
#if defined(BDNS_TLS)
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "bdns/delay.hpp"

namespace bdns::net {

struct HttpResult {
    int status = 0;
    std::string body;
    std::string content_type;
    std::optional<uint32_t> retry_after_ms;
};

// One logical peer connection with keep-alive and optional injected latency
// (the harness's per-link delay shim wraps every endpoint this way).
class HttpChannel {
public:
    explicit HttpChannel(std::string base_url,
                         std::optional<DelayDistribution> injected_delay = std::nullopt);

    HttpResult post(const std::string& path, std::string_view body,
                    const std::string& content_type,
                    const std::multimap<std::string, std::string>& headers = {});
    HttpResult get(const std::string& path);

    const std::string& base_url() const { return base_url_; }
    uint64_t injected_delay_total_ms() const { return injected_total_ms_; }

private:
    void maybe_delay();

    std::string base_url_;
    std::optional<DelayDistribution> delay_;
    crypto::SecureRng rng_;
    std::mutex mu_;
    httplib::Client client_;
    uint64_t injected_total_ms_ = 0;
};

struct TlsOptions {
    bool enabled = false;
    std::string cert_path;
    std::string key_path;
};

}  // namespace bdns::net

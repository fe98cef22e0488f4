#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "bdns/ans/service.hpp"
#include "bdns/net/http.hpp"

namespace bdns::ans {

// DoH face of the authoritative server:
//   POST /dns-query  application/dns-message in and out
//   POST /v1/proof   binary MissProof -> {"verdict": ...}
//   GET  /v1/config  identity, zones, verification key
// An optional UDP responder serves the plain legacy path.
class AnsHttpServer {
public:
    explicit AnsHttpServer(AnsService& service);
    ~AnsHttpServer();

    AnsHttpServer(const AnsHttpServer&) = delete;
    AnsHttpServer& operator=(const AnsHttpServer&) = delete;

    int start(const std::string& host, int port);
    // binds a UDP socket answering plain DNS; returns the bound port
    int start_udp(const std::string& host, int port);
    void stop();
    int port() const { return port_; }
    int udp_port() const { return udp_port_; }

private:
    AnsService& service_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;

    int udp_fd_ = -1;
    int udp_port_ = 0;
    std::thread udp_thread_;
    std::atomic<bool> udp_stop_{false};
};

}  // namespace bdns::ans

#include "bdns/ans/http.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include <nlohmann/json.hpp>

namespace bdns::ans {

AnsHttpServer::AnsHttpServer(AnsService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
    server_->Post("/dns-query", [this](const httplib::Request& req, httplib::Response& res) {
        std::span<const uint8_t> body{reinterpret_cast<const uint8_t*>(req.body.data()),
                                      req.body.size()};
        dnswire::Message query;
        try {
            query = dnswire::Message::parse(body);
        } catch (const std::exception&) {
            res.status = 400;
            return;
        }
        auto reply = service_.serve_query(query, req.remote_addr, now_unix_ms());
        auto bytes = reply.encode();
        res.set_content(std::string(bytes.begin(), bytes.end()), "application/dns-message");
    });

    server_->Post("/v1/proof", [this](const httplib::Request& req, httplib::Response& res) {
        ProofVerdict verdict;
        try {
            auto proof = MissProof::deserialize(
                {reinterpret_cast<const uint8_t*>(req.body.data()), req.body.size()});
            verdict = service_.handle_proof(proof, req.remote_addr, now_unix_ms());
        } catch (const std::exception&) {
            verdict = ProofVerdict::malformed;
        }
        res.status = verdict == ProofVerdict::valid ? 200 : 403;
        res.set_content(
            nlohmann::json{{"verdict", std::string(to_string(verdict))}}.dump(),
            "application/json");
    });

    server_->Get("/v1/config", [this](const httplib::Request&, httplib::Response& res) {
        const auto& cfg = service_.config();
        res.set_content(nlohmann::json{{"identity", cfg.identity},
                                       {"address", cfg.public_addr.to_string()},
                                       {"verify_key",
                                        crypto::hex_encode(service_.verify_key())},
                                       {"populate_delay", cfg.populate_delay.to_string()}}
                            .dump(),
                        "application/json");
    });

    server_->Get("/v1/stats", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(service_.stats().to_json(), "application/json");
    });
}

AnsHttpServer::~AnsHttpServer() { stop(); }

int AnsHttpServer::start(const std::string& host, int port) {
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
    } else {
        if (!server_->bind_to_port(host, port))
            throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
        port_ = port;
    }
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

int AnsHttpServer::start_udp(const std::string& host, int port) {
    udp_fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (udp_fd_ < 0) throw std::runtime_error("udp socket failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<uint16_t>(port));
    inet_pton(AF_INET, host.c_str(), &addr.sin_addr);
    if (::bind(udp_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        ::close(udp_fd_);
        throw std::runtime_error("udp bind failed");
    }
    socklen_t len = sizeof addr;
    getsockname(udp_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    udp_port_ = ntohs(addr.sin_port);

    timeval tv{0, 200'000};
    setsockopt(udp_fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);

    udp_thread_ = std::thread([this] {
        std::vector<uint8_t> buf(4096);
        while (!udp_stop_.load()) {
            sockaddr_in peer{};
            socklen_t peer_len = sizeof peer;
            ssize_t n = recvfrom(udp_fd_, buf.data(), buf.size(), 0,
                                 reinterpret_cast<sockaddr*>(&peer), &peer_len);
            if (n <= 0) continue;
            char ip[INET_ADDRSTRLEN] = {};
            inet_ntop(AF_INET, &peer.sin_addr, ip, sizeof ip);
            try {
                auto query = dnswire::Message::parse({buf.data(), static_cast<size_t>(n)});
                auto reply = service_.serve_query(query, ip, now_unix_ms());
                auto bytes = reply.encode();
                sendto(udp_fd_, bytes.data(), bytes.size(), 0,
                       reinterpret_cast<sockaddr*>(&peer), peer_len);
            } catch (const std::exception&) {
                // drop unparseable datagrams
            }
        }
    });
    return udp_port_;
}

void AnsHttpServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
    udp_stop_.store(true);
    if (udp_thread_.joinable()) udp_thread_.join();
    if (udp_fd_ >= 0) {
        ::close(udp_fd_);
        udp_fd_ = -1;
    }
}

}  // namespace bdns::ans

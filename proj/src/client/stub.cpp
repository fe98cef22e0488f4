#include "bdns/client/stub.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include "bdns/ans/scheduler.hpp"

namespace bdns::client {

namespace {

int bound_socket(int type, const std::string& host, uint16_t port, uint16_t* out_port) {
    int fd = ::socket(AF_INET, type, 0);
    if (fd < 0) throw std::runtime_error("socket failed");
    int one = 1;
    setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    inet_pton(AF_INET, host.c_str(), &addr.sin_addr);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        ::close(fd);
        throw std::runtime_error("bind failed on " + host + ":" + std::to_string(port));
    }
    socklen_t len = sizeof addr;
    getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    *out_port = ntohs(addr.sin_port);
    timeval tv{0, 200'000};
    setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    return fd;
}

}  // namespace

StubListener::StubListener(ClientProxy& proxy) : proxy_(proxy) {}

StubListener::~StubListener() { stop(); }

dnswire::Message StubListener::answer_question(const dnswire::Message& query) {
    dnswire::Message resp;
    resp.id = query.id;
    resp.qr = true;
    resp.ra = true;
    resp.rd = query.rd;
    resp.questions = query.questions;

    if (query.questions.empty()) {
        resp.rcode = dnswire::Rcode::formerr;
        return resp;
    }
    const auto& q = query.questions.front();
    if (q.qtype != dnswire::kTypeA && q.qtype != dnswire::kTypeAaaa) {
        resp.rcode = dnswire::Rcode::notimp;
        return resp;
    }

    uint64_t now = ans::now_unix_ms();
    auto outcome = proxy_.resolve(q.qname, q.qtype, now);
    if (!outcome.ok()) {
        resp.rcode = dnswire::Rcode::servfail;
        return resp;
    }
    uint32_t ttl = outcome.expire_ts_ms > now
                       ? static_cast<uint32_t>((outcome.expire_ts_ms - now) / 1000)
                       : 0;
    resp.answers.push_back(dnswire::ResourceRecord::address(q.qname, *outcome.answer, ttl));
    return resp;
}

int StubListener::start(const std::string& host, int port) {
    uint16_t udp_port = 0, tcp_port = 0;
    udp_fd_ = bound_socket(SOCK_DGRAM, host, static_cast<uint16_t>(port), &udp_port);
    // share the port number between transports, as a stock resolver would
    tcp_fd_ = bound_socket(SOCK_STREAM, host, udp_port, &tcp_port);
    if (::listen(tcp_fd_, 16) != 0) throw std::runtime_error("listen failed");
    port_ = udp_port;

    udp_thread_ = std::thread([this] { udp_loop(); });
    tcp_thread_ = std::thread([this] { tcp_loop(); });
    return port_;
}

void StubListener::udp_loop() {
    std::vector<uint8_t> buf(4096);
    while (!stop_.load()) {
        sockaddr_in peer{};
        socklen_t peer_len = sizeof peer;
        ssize_t n = recvfrom(udp_fd_, buf.data(), buf.size(), 0,
                             reinterpret_cast<sockaddr*>(&peer), &peer_len);
        if (n <= 0) continue;
        std::vector<uint8_t> datagram(buf.begin(), buf.begin() + n);
        std::lock_guard lk(workers_mu_);
        workers_.emplace_back([this, datagram = std::move(datagram), peer, peer_len] {
            try {
                auto query = dnswire::Message::parse(datagram);
                auto resp = answer_question(query).encode();
                sendto(udp_fd_, resp.data(), resp.size(), 0,
                       reinterpret_cast<const sockaddr*>(&peer), peer_len);
            } catch (const std::exception&) {
            }
        });
    }
}

void StubListener::tcp_loop() {
    while (!stop_.load()) {
        sockaddr_in peer{};
        socklen_t peer_len = sizeof peer;
        int conn = accept(tcp_fd_, reinterpret_cast<sockaddr*>(&peer), &peer_len);
        if (conn < 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
            continue;
        }
        std::lock_guard lk(workers_mu_);
        workers_.emplace_back([this, conn] {
            uint8_t len_buf[2];
            if (recv(conn, len_buf, 2, MSG_WAITALL) == 2) {
                size_t len = static_cast<size_t>(len_buf[0]) << 8 | len_buf[1];
                std::vector<uint8_t> msg(len);
                if (recv(conn, msg.data(), len, MSG_WAITALL) == static_cast<ssize_t>(len)) {
                    try {
                        auto resp = answer_question(dnswire::Message::parse(msg)).encode();
                        uint8_t out_len[2] = {static_cast<uint8_t>(resp.size() >> 8),
                                              static_cast<uint8_t>(resp.size())};
                        send(conn, out_len, 2, 0);
                        send(conn, resp.data(), resp.size(), 0);
                    } catch (const std::exception&) {
                    }
                }
            }
            ::close(conn);
        });
    }
}

void StubListener::stop() {
    if (stop_.exchange(true)) return;
    if (udp_thread_.joinable()) udp_thread_.join();
    if (tcp_thread_.joinable()) tcp_thread_.join();
    for (auto& w : workers_)
        if (w.joinable()) w.join();
    if (udp_fd_ >= 0) ::close(udp_fd_);
    if (tcp_fd_ >= 0) ::close(tcp_fd_);
    udp_fd_ = tcp_fd_ = -1;
}

}  // namespace bdns::client

#pragma once

#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "bdns/client/proxy.hpp"

namespace bdns::client {

// Local DNS front end over UDP and TCP: parses standard questions, drives
// the proxy, and synthesizes standard answers from the outcomes.
class StubListener {
public:
    explicit StubListener(ClientProxy& proxy);
    ~StubListener();

    StubListener(const StubListener&) = delete;
    StubListener& operator=(const StubListener&) = delete;

    // binds both sockets (port 0 picks one; both share the number)
    int start(const std::string& host, int port);
    void stop();
    int port() const { return port_; }

    dnswire::Message answer_question(const dnswire::Message& query);

private:
    void udp_loop();
    void tcp_loop();

    ClientProxy& proxy_;
    int udp_fd_ = -1;
    int tcp_fd_ = -1;
    int port_ = 0;
    std::atomic<bool> stop_{false};
    std::thread udp_thread_;
    std::thread tcp_thread_;
    std::vector<std::thread> workers_;
    std::mutex workers_mu_;
};

}  // namespace bdns::client

#pragma once

#include <memory>
#include <string>
#include <thread>

#include "bdns/net/http.hpp"
#include "bdns/rer/service.hpp"

namespace bdns::rer {

// Binary-body HTTP face of the resolver:
//   POST /v1/register   serialized PublicKey -> {"client_id": hex}
//   POST /v1/query      X-Client-Id header + query bytes -> blob(response) blob(signature)
//   POST /v1/populate   signed PopulateMsg -> {"accepted": bool, ...}
//   GET  /v1/config     advertised LweParams, cache shape, verification key
//   GET  /v1/stats      counters and latency summaries
class RerHttpServer {
public:
    explicit RerHttpServer(RerService& service, net::TlsOptions tls = {});
    ~RerHttpServer();

    RerHttpServer(const RerHttpServer&) = delete;
    RerHttpServer& operator=(const RerHttpServer&) = delete;

    // binds (port 0 picks a free one), starts serving on a background thread
    int start(const std::string& host, int port);
    void stop();
    int port() const { return port_; }

private:
    void install_routes();

    RerService& service_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace bdns::rer

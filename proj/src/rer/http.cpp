#include "bdns/rer/http.hpp"

#include <nlohmann/json.hpp>

#include "bdns/ans/scheduler.hpp"
#include "bdns/wire.hpp"

namespace bdns::rer {

namespace {

std::span<const uint8_t> body_bytes(const httplib::Request& req) {
    return {reinterpret_cast<const uint8_t*>(req.body.data()), req.body.size()};
}

void json_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(nlohmann::json{{"error", message}}.dump(), "application/json");
}

}  // namespace

RerHttpServer::RerHttpServer(RerService& service, net::TlsOptions tls) : service_(service) {
#if defined(BDNS_TLS)
    if (tls.enabled) {
        server_ = std::make_unique<httplib::SSLServer>(tls.cert_path.c_str(),
                                                       tls.key_path.c_str());
    } else {
        server_ = std::make_unique<httplib::Server>();
    }
#else
    if (tls.enabled) throw std::runtime_error("TLS support not compiled in");
    server_ = std::make_unique<httplib::Server>();
#endif
    install_routes();
}

RerHttpServer::~RerHttpServer() { stop(); }

void RerHttpServer::install_routes() {
    server_->Post("/v1/register", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            auto token = service_.register_client(body_bytes(req));
            res.set_content(nlohmann::json{{"client_id", token}}.dump(), "application/json");
        } catch (const ParamsMismatchError& e) {
            res.status = 409;
            res.set_content(nlohmann::json{{"error", e.what()},
                                           {"advertised", nlohmann::json::parse(
                                                              e.advertised_params_json)}}
                                .dump(),
                            "application/json");
        } catch (const std::exception& e) {
            json_error(res, 400, e.what());
        }
    });

    server_->Post("/v1/query", [this](const httplib::Request& req, httplib::Response& res) {
        std::string token = req.get_header_value("X-Client-Id");
        try {
            auto result = service_.handle_query(token, body_bytes(req), req.remote_addr,
                                                ans::now_unix_ms());
            wire::Writer w;
            w.blob(result.response_bytes);
            w.blob(result.transcript.serialize());
            auto out = w.take();
            res.set_content(std::string(out.begin(), out.end()), "application/octet-stream");
        } catch (const OverloadError& e) {
            res.status = 429;
            res.set_header("Retry-After-Ms", std::to_string(e.retry_after_ms));
            res.set_content(nlohmann::json{{"error", "overloaded"}}.dump(),
                            "application/json");
        } catch (const UnknownClientError& e) {
            json_error(res, 404, e.what());
        } catch (const std::exception& e) {
            json_error(res, 400, e.what());
        }
    });

    server_->Post("/v1/populate", [this](const httplib::Request& req, httplib::Response& res) {
        auto outcome = service_.apply_populate(body_bytes(req), ans::now_unix_ms());
        res.status = outcome.accepted ? 200 : 403;
        res.set_content(nlohmann::json{{"accepted", outcome.accepted},
                                       {"reason", outcome.reason},
                                       {"snapshot_version", outcome.snapshot_version}}
                            .dump(),
                        "application/json");
    });

    server_->Get("/v1/config", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(service_.config_json(), "application/json");
    });

    server_->Get("/v1/stats", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(service_.stats().to_json(), "application/json");
    });
}

int RerHttpServer::start(const std::string& host, int port) {
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

void RerHttpServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace bdns::rer

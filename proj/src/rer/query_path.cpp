// The private query path. Everything here operates on opaque encoded slots:
// this translation unit must stay free of the record codec, and the blindness
// audit in the test suite enforces exactly that. After parsing, nothing in
// this path branches on query content.

#include <chrono>

#include "bdns/rer/service.hpp"

namespace bdns::rer {

std::string RerService::register_client(std::span<const uint8_t> public_key_bytes) {
    auto pk = pir::deserialize_public_key(public_key_bytes);
    if (pk.params_digest != params_.digest())
        throw ParamsMismatchError(config_json());

    // stable token: same key registers to the same identity
    auto digest = crypto::sha256(public_key_bytes);
    std::string token = crypto::hex_encode({digest.data(), 16});

    std::lock_guard lk(clients_mu_);
    auto [it, inserted] = clients_.try_emplace(token, std::move(pk));
    if (inserted) registrations_.fetch_add(1, std::memory_order_relaxed);
    return token;
}

bool RerService::is_registered(const std::string& client_token) const {
    std::lock_guard lk(clients_mu_);
    return clients_.contains(client_token);
}

QueryResult RerService::handle_query(const std::string& client_token,
                                     std::span<const uint8_t> query_bytes,
                                     const std::string& client_ip, uint64_t now_ms) {
    pir::PublicKey pk;
    {
        std::lock_guard lk(clients_mu_);
        auto it = clients_.find(client_token);
        if (it == clients_.end()) throw UnknownClientError("client not registered");
        pk = it->second;
    }

    if (!admission_.try_acquire()) {
        queries_overloaded_.fetch_add(1, std::memory_order_relaxed);
        throw OverloadError(cfg_.retry_after_ms);
    }
    struct Release {
        std::counting_semaphore<1024>& sem;
        ~Release() { sem.release(); }
    } release{admission_};

    auto snap = snapshot();
    auto query = pir::deserialize_query(params_, query_bytes);

    auto start = std::chrono::steady_clock::now();
    auto response = pir::answer(pk, snap->encoded, query);
    auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    answer_hist_.record(static_cast<uint64_t>(elapsed));

    QueryResult out;
    out.response_bytes = pir::serialize(params_, response);

    out.transcript.signer = signer_id_;
    out.transcript.message = transcript_message(client_ip, now_ms,
                                                crypto::sha256(query_bytes),
                                                crypto::sha256(out.response_bytes));
    out.transcript.signature = crypto::ed25519_sign(signing_key_, out.transcript.message);

    queries_served_.fetch_add(1, std::memory_order_relaxed);
    return out;
}

}  // namespace bdns::rer

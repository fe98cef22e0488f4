#include "bdns/rer/service.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace bdns::rer {

namespace {

uint64_t bump_restart_counter(const std::string& state_path) {
    if (state_path.empty()) return 0;
    uint64_t count = 0;
    {
        std::ifstream f(state_path);
        if (f) f >> count;
    }
    ++count;
    std::ofstream f(state_path, std::ios::trunc);
    f << count;
    return count;
}

}  // namespace

RerService::RerService(RerConfig cfg, crypto::SigningKey signing_key, TrustRegistry registry,
                       std::string state_path)
    : cfg_(cfg),
      params_(pir::default_params(cfg.cache.n_slots, cfg.cache.slot_bytes, cfg.dims)),
      signing_key_(signing_key),
      registry_(std::move(registry)),
      admission_(cfg.max_inflight_queries) {
    cfg_.cache.validate();
    if (cfg.lattice_n) params_.n = *cfg.lattice_n;
    if (cfg.q_bits) params_.q_bits = *cfg.q_bits;
    params_.validate();
    // serving gate: refuse configurations whose noise headroom is gone
    double margin = pir::noise_margin(params_, std::max(params_.n1, params_.n2));
    if (margin <= 0)
        throw std::invalid_argument("refusing to serve: noise margin " +
                                    std::to_string(margin) + " bits");

    auto key_digest = crypto::sha256(signing_key_.verify);
    std::copy_n(key_digest.begin(), signer_id_.size(), signer_id_.begin());

    auto plain = std::make_shared<cache::PlainCache>(cfg_.cache);
    auto snap = std::make_shared<Snapshot>();
    snap->version = 0;
    snap->encoded = pir::EncodedCache::empty(params_);
    snap->plain = std::move(plain);
    snap_ = std::move(snap);

    restart_count_ = bump_restart_counter(state_path);
}

std::shared_ptr<const Snapshot> RerService::snapshot() const {
    std::lock_guard lk(snap_mu_);
    return snap_;
}

void RerService::swap_snapshot(std::shared_ptr<const Snapshot> next) {
    std::lock_guard lk(snap_mu_);
    snap_ = std::move(next);
}

std::string RerService::config_json() const {
    nlohmann::json j{{"params", nlohmann::json::parse(params_.to_json())},
                     {"cache", {{"n_slots", cfg_.cache.n_slots},
                                {"slot_bytes", cfg_.cache.slot_bytes}}},
                     {"verify_key", crypto::hex_encode(signing_key_.verify)},
                     {"max_inflight_queries", cfg_.max_inflight_queries}};
    return j.dump();
}

std::string RerStats::to_json() const {
    nlohmann::json j{{"registrations", registrations},
                     {"queries_served", queries_served},
                     {"queries_overloaded", queries_overloaded},
                     {"populates_accepted", populates_accepted},
                     {"populates_rejected", populates_rejected},
                     {"snapshot_version", snapshot_version},
                     {"restart_count", restart_count},
                     {"answer_mean_us", answer_mean_us},
                     {"populate_mean_us", populate_mean_us}};
    return j.dump();
}

RerStats RerService::stats() const {
    RerStats s;
    s.registrations = registrations_.load();
    s.queries_served = queries_served_.load();
    s.queries_overloaded = queries_overloaded_.load();
    s.populates_accepted = populates_accepted_.load();
    s.populates_rejected = populates_rejected_.load();
    s.snapshot_version = snapshot()->version;
    s.restart_count = restart_count_;
    s.answer_mean_us = answer_hist_.mean_us();
    s.populate_mean_us = populate_hist_.mean_us();
    return s;
}

}  // namespace bdns::rer

#include "bdns/client/proxy.hpp"

#include <chrono>

#include <nlohmann/json.hpp>

#include "bdns/wire.hpp"

namespace bdns::client {

namespace {

std::optional<DelayDistribution> delay_from_json(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return DelayDistribution::parse(j.at(key).get<std::string>());
}

void delay_to_json(nlohmann::json& j, const char* key,
                   const std::optional<DelayDistribution>& d) {
    if (d) j[key] = d->to_string();
}

// the last `labels` labels of a domain name
std::string label_suffix(const std::string& domain, size_t labels) {
    size_t count = 0;
    for (size_t i = domain.size(); i-- > 0;) {
        if (domain[i] != '.') continue;
        if (++count == labels) return domain.substr(i + 1);
    }
    return domain;
}

std::string_view body_view(const std::vector<uint8_t>& bytes) {
    return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

}  // namespace

std::string_view to_string(ResolutionSource s) {
    switch (s) {
        case ResolutionSource::pir_hit: return "pir_hit";
        case ResolutionSource::shortcut_ans: return "shortcut_ans";
        case ResolutionSource::full_iterative: return "full_iterative";
    }
    return "unknown";
}

std::string ClientConfig::to_json() const {
    nlohmann::json j{{"resolver_url", resolver_url},
                     {"resolver_addr", resolver_addr},
                     {"root_url", root_url},
                     {"tld_url", tld_url},
                     {"ans_endpoints", ans_endpoints},
                     {"backup_pool", backup_pool},
                     {"transcript_ring", transcript_ring}};
    delay_to_json(j, "resolver_delay", resolver_delay);
    delay_to_json(j, "root_delay", root_delay);
    delay_to_json(j, "tld_delay", tld_delay);
    delay_to_json(j, "final_delay", final_delay);
    return j.dump(2);
}

ClientConfig ClientConfig::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    ClientConfig c;
    c.resolver_url = j.at("resolver_url").get<std::string>();
    c.resolver_addr = j.value("resolver_addr", std::string("127.0.0.1"));
    c.root_url = j.value("root_url", std::string());
    c.tld_url = j.value("tld_url", std::string());
    if (j.contains("ans_endpoints"))
        c.ans_endpoints = j.at("ans_endpoints").get<std::map<std::string, std::string>>();
    c.backup_pool = j.value("backup_pool", size_t{2});
    c.transcript_ring = j.value("transcript_ring", size_t{128});
    c.resolver_delay = delay_from_json(j, "resolver_delay");
    c.root_delay = delay_from_json(j, "root_delay");
    c.tld_delay = delay_from_json(j, "tld_delay");
    c.final_delay = delay_from_json(j, "final_delay");
    return c;
}

std::string ResolutionOutcome::to_json_line(const std::string& domain, uint64_t ts_ms) const {
    nlohmann::json j{
        {"ts_ms", ts_ms},
        {"domain", domain},
        {"source", std::string(to_string(source))},
        {"cache_status", cache_status == cache::FindStatus::hit       ? "hit"
                         : cache_status == cache::FindStatus::expired ? "expired"
                                                                      : "absent"},
        {"latency_ms", latency_ms},
        {"challenged", challenged},
        {"root_queries", root_queries},
        {"tld_queries", tld_queries},
        {"final_queries", final_queries}};
    if (answer) j["answer"] = answer->to_string();
    if (!proof_verdict.empty()) j["proof_verdict"] = proof_verdict;
    if (!error.empty()) j["error"] = error;
    return j.dump();
}

ClientProxy::ClientProxy(ClientConfig cfg) : cfg_(std::move(cfg)) {}

void ClientProxy::init() {
    resolver_ = std::make_unique<net::HttpChannel>(cfg_.resolver_url, cfg_.resolver_delay);
    if (!cfg_.root_url.empty())
        root_ = std::make_unique<net::HttpChannel>(cfg_.root_url, cfg_.root_delay);
    if (!cfg_.tld_url.empty())
        tld_ = std::make_unique<net::HttpChannel>(cfg_.tld_url, cfg_.tld_delay);

    auto cfg_res = resolver_->get("/v1/config");
    if (cfg_res.status != 200)
        throw std::runtime_error("resolver config fetch failed: " + cfg_res.body);
    auto j = nlohmann::json::parse(cfg_res.body);
    params_ = pir::LweParams::from_json(j.at("params").dump());
    auto key = crypto::hex_decode(j.at("verify_key").get<std::string>());
    std::copy(key.begin(), key.end(), resolver_verify_key_.begin());

    primary_ = make_registered_pair();
    std::lock_guard lk(keys_mu_);
    for (size_t i = 0; i < cfg_.backup_pool; ++i) backups_.push_back(make_registered_pair());
}

ClientProxy::KeyPair ClientProxy::make_registered_pair() {
    KeyPair pair;
    auto [qk, pk] = pir::setup_user(params_.slot_count(), params_, rng_);
    pair.qk = std::move(qk);
    pair.pk = std::move(pk);
    pair.pk_bytes = pir::serialize(pair.pk);
    auto res = resolver_->post("/v1/register", body_view(pair.pk_bytes),
                               "application/octet-stream");
    if (res.status != 200) throw std::runtime_error("registration failed: " + res.body);
    pair.token = nlohmann::json::parse(res.body).at("client_id").get<std::string>();
    return pair;
}

size_t ClientProxy::backup_pool_size() const {
    std::lock_guard lk(keys_mu_);
    return backups_.size();
}

std::vector<std::string> ClientProxy::backup_fingerprints() const {
    std::lock_guard lk(keys_mu_);
    std::vector<std::string> out;
    for (const auto& b : backups_) {
        auto digest = crypto::sha256(
            {reinterpret_cast<const uint8_t*>(b.qk.secret.data()), b.qk.secret.size() * 4});
        out.push_back(crypto::hex_encode({digest.data(), 8}));
    }
    return out;
}

std::vector<Transcript> ClientProxy::transcripts() const {
    std::lock_guard lk(ring_mu_);
    return {ring_.begin(), ring_.end()};
}

void ClientProxy::record_transcript(Transcript t) {
    std::lock_guard lk(ring_mu_);
    ring_.push_back(std::move(t));
    while (ring_.size() > cfg_.transcript_ring) ring_.pop_front();
}

ClientProxy::RerReply ClientProxy::rer_query(const KeyPair& pair, std::string_view domain,
                                             uint64_t idx,
                                             std::vector<uint8_t>* query_bytes_out) {
    auto q = pir::query(pair.qk, idx, rng_);
    auto q_bytes = pir::serialize(params_, q);

    net::HttpResult res;
    for (int attempt = 0; attempt < 8; ++attempt) {
        res = resolver_->post("/v1/query", body_view(q_bytes), "application/octet-stream",
                              {{"X-Client-Id", pair.token}});
        if (res.status != 429) break;
        std::this_thread::sleep_for(
            std::chrono::milliseconds(res.retry_after_ms.value_or(100)));
    }
    if (res.status != 200)
        throw std::runtime_error("resolver query failed (" + std::to_string(res.status) +
                                 "): " + res.body);

    wire::Reader rd({reinterpret_cast<const uint8_t*>(res.body.data()), res.body.size()});
    auto resp_bytes = rd.blob();
    auto sig_bytes = rd.blob();

    RerReply reply;
    reply.response_bytes.assign(resp_bytes.begin(), resp_bytes.end());
    reply.signature = rer::TranscriptSignature::deserialize(sig_bytes);
    if (!rer::verify_transcript(resolver_verify_key_, reply.signature))
        throw std::runtime_error("resolver transcript signature invalid");
    reply.response = pir::deserialize_response(params_, reply.response_bytes);

    Transcript t;
    t.query_bytes = q_bytes;
    t.response_bytes = reply.response_bytes;
    t.signature = reply.signature;
    t.timestamp_ms = rer::parse_transcript_message(reply.signature.message).timestamp_ms;
    t.domain = std::string(domain);
    record_transcript(std::move(t));

    if (query_bytes_out) *query_bytes_out = std::move(q_bytes);
    return reply;
}

net::HttpChannel& ClientProxy::ans_channel(const std::string& identity_addr) {
    std::lock_guard lk(channels_mu_);
    auto it = finals_.find(identity_addr);
    if (it != finals_.end()) return *it->second;
    auto ep = cfg_.ans_endpoints.find(identity_addr);
    if (ep == cfg_.ans_endpoints.end())
        throw std::runtime_error("no endpoint configured for ANS " + identity_addr);
    auto channel = std::make_unique<net::HttpChannel>(ep->second, cfg_.final_delay);
    return *finals_.emplace(identity_addr, std::move(channel)).first->second;
}

dnswire::Message ClientProxy::ans_query(net::HttpChannel& channel, const std::string& qname,
                                        uint16_t qtype, bool attach_pr,
                                        ResolutionOutcome& outcome, uint64_t now_ms) {
    dnswire::Message query;
    query.id = static_cast<uint16_t>(rng_.next_u32());
    query.questions.push_back({qname, qtype, dnswire::kClassIn});
    if (attach_pr) {
        query.has_edns = true;
        query.edns_pr = dnswire::EdnsPr{cache::IpAddr::parse(cfg_.resolver_addr), false};
    }

    for (int attempt = 0; attempt < 2; ++attempt) {
        auto bytes = query.encode();
        auto res = channel.post("/dns-query", body_view(bytes), "application/dns-message");
        if (res.status != 200)
            throw std::runtime_error("DoH query failed (" + std::to_string(res.status) +
                                     "): " + res.body);
        auto reply = dnswire::Message::parse(
            {reinterpret_cast<const uint8_t*>(res.body.data()), res.body.size()});

        bool challenged = reply.edns_pr && reply.edns_pr->challenge;
        if (challenged) {
            outcome.challenged = true;
            outcome.proof_verdict = handle_challenge(qname, qtype, channel);
            ++challenges_handled_;
        }
        // a refused answer with an accepted proof means the server held our
        // answer behind the outstanding challenge; retry once
        if (challenged && reply.rcode == dnswire::Rcode::refused &&
            outcome.proof_verdict == "valid" && attempt == 0)
            continue;
        return reply;
    }
    throw std::runtime_error("DoH retry limit reached");
}

std::string ClientProxy::handle_challenge(const std::string& domain, uint16_t rtype,
                                          net::HttpChannel& channel) {
    KeyPair backup;
    {
        std::lock_guard lk(keys_mu_);
        if (backups_.empty()) return "no-backup-available";
        backup = backups_.front();
        backups_.pop_front();
    }

    ans::MissProof proof;
    uint64_t idx = pir::index(domain, params_.slot_count());
    auto reply = rer_query(backup, domain, idx, &proof.query_bytes);
    proof.response_bytes = reply.response_bytes;
    proof.backup_qk_bytes = pir::serialize(backup.qk);
    proof.rer_sig = reply.signature;
    auto fields = rer::parse_transcript_message(reply.signature.message);
    proof.client_ip = fields.client_ip;
    proof.timestamp_ms = fields.timestamp_ms;
    proof.domain = domain;

    auto bytes = proof.serialize();
    auto res = channel.post("/v1/proof", body_view(bytes), "application/octet-stream");
    std::string verdict = "transport-error";
    if (res.status != 0) {
        try {
            verdict = nlohmann::json::parse(res.body).at("verdict").get<std::string>();
        } catch (const std::exception&) {
            verdict = "unparseable-verdict";
        }
    }
    (void)rtype;

    // the consumed pair was disclosed to the ANS; regenerate regardless of
    // the verdict so the pool never shrinks
    auto fresh = make_registered_pair();
    std::lock_guard lk(keys_mu_);
    backups_.push_back(std::move(fresh));
    return verdict;
}

ResolutionOutcome ClientProxy::full_iterative(const std::string& domain, uint16_t rtype,
                                              uint64_t now_ms, ResolutionOutcome outcome) {
    outcome.source = ResolutionSource::full_iterative;
    if (!root_ || !tld_) {
        outcome.error = "iterative lookup not configured";
        return outcome;
    }

    // query minimization: each hop sees only the label suffix it needs
    auto root_reply =
        ans_query(*root_, label_suffix(domain, 1), dnswire::kTypeNs, false, outcome, now_ms);
    ++outcome.root_queries;
    if (root_reply.rcode != dnswire::Rcode::noerror) {
        outcome.error = "root refused";
        return outcome;
    }

    auto tld_reply =
        ans_query(*tld_, label_suffix(domain, 2), dnswire::kTypeNs, false, outcome, now_ms);
    ++outcome.tld_queries;
    std::optional<cache::IpAddr> final_addr;
    for (const auto& rr : tld_reply.answers)
        if (rr.rtype == dnswire::kTypeA || rr.rtype == dnswire::kTypeAaaa)
            final_addr = rr.rdata_as_ip();
    for (const auto& rr : tld_reply.additionals)
        if (rr.rtype == dnswire::kTypeA || rr.rtype == dnswire::kTypeAaaa)
            final_addr = rr.rdata_as_ip();
    if (!final_addr) {
        outcome.error = "no glue for final ANS";
        return outcome;
    }

    auto& channel = ans_channel(final_addr->to_string());
    auto reply = ans_query(channel, domain, rtype, true, outcome, now_ms);
    ++outcome.final_queries;
    if (reply.rcode != dnswire::Rcode::noerror || reply.answers.empty()) {
        outcome.error = "final ANS returned no answer";
        return outcome;
    }
    for (const auto& rr : reply.answers)
        if (rr.rtype == rtype) {
            outcome.answer = rr.rdata_as_ip();
            outcome.expire_ts_ms = now_ms + static_cast<uint64_t>(rr.ttl) * 1000;
        }
    if (!outcome.answer) outcome.error = "answer type mismatch";
    return outcome;
}

ResolutionOutcome ClientProxy::resolve(const std::string& domain, uint16_t rtype,
                                       uint64_t now_ms) {
    auto start = std::chrono::steady_clock::now();
    ResolutionOutcome outcome;
    auto finish = [&](ResolutionOutcome out) {
        out.latency_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        return out;
    };

    try {
        const std::string norm = pir::normalize_domain(domain);
        uint64_t idx = pir::index(norm, params_.slot_count());
        auto reply = rer_query(primary_, norm, idx, nullptr);
        auto slot_bytes = pir::extract(primary_.qk, reply.response);
        auto slot = cache::parse_slot(slot_bytes);
        auto found = cache::slot_find(slot, pir::domain_digest(norm), rtype, now_ms);
        outcome.cache_status = found.status;

        if (found.status == cache::FindStatus::hit) {
            outcome.source = ResolutionSource::pir_hit;
            outcome.answer = found.record->answer_addr();
            outcome.expire_ts_ms = found.record->expire_ts_ms;
            return finish(outcome);
        }

        if (found.status == cache::FindStatus::expired) {
            // the stale record still names the final ANS: go straight there
            auto ans_addr = found.record->ans_addr();
            if (ans_addr) {
                try {
                    auto& channel = ans_channel(ans_addr->to_string());
                    auto reply2 = ans_query(channel, norm, rtype, true, outcome, now_ms);
                    ++outcome.final_queries;
                    if (reply2.rcode == dnswire::Rcode::noerror && !reply2.answers.empty()) {
                        outcome.source = ResolutionSource::shortcut_ans;
                        for (const auto& rr : reply2.answers)
                            if (rr.rtype == rtype) {
                                outcome.answer = rr.rdata_as_ip();
                                outcome.expire_ts_ms =
                                    now_ms + static_cast<uint64_t>(rr.ttl) * 1000;
                            }
                        if (outcome.answer) return finish(outcome);
                    }
                } catch (const std::exception&) {
                    // embedded address no longer good: fall back to the full path
                }
            }
        }

        return finish(full_iterative(norm, rtype, now_ms, std::move(outcome)));
    } catch (const std::exception& e) {
        outcome.error = e.what();
        return finish(outcome);
    }
}

}  // namespace bdns::client

#include "bdns/ans/service.hpp"

#include <nlohmann/json.hpp>

#include "bdns/cache/store.hpp"
#include "bdns/pir/engine.hpp"

namespace bdns::ans {

using dnswire::Message;
using dnswire::Rcode;

AnsService::AnsService(AnsConfig cfg, crypto::SigningKey signing_key, ZoneData zone,
                       PopulateScheduler::Transport transport)
    : cfg_(std::move(cfg)),
      signing_key_(signing_key),
      zone_(std::move(zone)),
      scheduler_(std::move(transport)) {}

rer::PopulateMsg AnsService::build_populate(const ZoneRecord& rec, uint64_t now_ms) const {
    rer::PopulateRecord pr;
    pr.domain = rec.domain;
    pr.rtype = rec.rtype;
    pr.rclass = cache::kClassIn;
    pr.expire_ts_ms = now_ms + static_cast<uint64_t>(rec.ttl_s) * 1000;
    pr.answer = cache::IpAddr::parse(rec.value);
    pr.ans_addr = cfg_.public_addr;

    rer::PopulateMsg msg;
    msg.sender = cfg_.identity;
    msg.sent_ts_ms = now_ms;
    msg.records.push_back(std::move(pr));
    msg.signature = crypto::ed25519_sign(signing_key_, msg.canonical_bytes());
    return msg;
}

void AnsService::dispatch_populate(const std::string& rer_addr, const ZoneRecord& rec,
                                   uint64_t now_ms) {
    auto peer = cfg_.resolvers.find(rer_addr);
    if (peer == cfg_.resolvers.end()) return;  // only configured resolvers are populated
    uint64_t due = now_ms + cfg_.populate_delay.sample(rng_);
    scheduler_.schedule(peer->second.endpoint, build_populate(rec, now_ms), due);
    ledger_[{rer_addr, rec.domain}] =
        LedgerEntry{now_ms, static_cast<uint64_t>(rec.ttl_s) * 1000};
    populates_scheduled_.fetch_add(1, std::memory_order_relaxed);
}

bool AnsService::populate_allowed(const std::string& rer_addr, const std::string& domain,
                                  uint64_t now_ms) const {
    std::lock_guard lk(mu_);
    auto it = ledger_.find({rer_addr, pir::normalize_domain(domain)});
    if (it == ledger_.end()) return true;
    return now_ms >= it->second.populated_at_ms + it->second.ttl_ms;
}

Message AnsService::serve_query(const Message& query, const std::string& sender_ip,
                                uint64_t now_ms) {
    Message resp;
    resp.id = query.id;
    resp.qr = true;
    resp.opcode = query.opcode;
    resp.questions = query.questions;
    resp.has_edns = query.has_edns;
    if (query.edns_pr) resp.edns_pr = dnswire::EdnsPr{query.edns_pr->rer_address, false};

    if (query.questions.empty()) {
        resp.rcode = Rcode::formerr;
        return resp;
    }
    const auto& q = query.questions.front();
    const std::string qname = pir::normalize_domain(q.qname);

    if (!zone_.serves(qname)) {
        resp.rcode = Rcode::refused;
        queries_refused_.fetch_add(1, std::memory_order_relaxed);
        return resp;
    }

    std::optional<ZoneRecord> answered;
    if (auto rec = zone_.lookup(qname, q.qtype)) {
        resp.aa = true;
        if (q.qtype == dnswire::kTypeNs) {
            resp.answers.push_back(dnswire::ResourceRecord::ns(qname, rec->value, rec->ttl_s));
            if (auto addr = zone_.glue(rec->value))
                resp.answers.push_back(
                    dnswire::ResourceRecord::address(rec->value, *addr, rec->ttl_s));
        } else {
            resp.answers.push_back(dnswire::ResourceRecord::address(
                qname, cache::IpAddr::parse(rec->value), rec->ttl_s));
            answered = rec;
        }
    } else {
        // delegation: an NS record for a proper suffix of the name
        std::string_view rest = qname;
        std::optional<ZoneRecord> delegation;
        while (true) {
            auto dot = rest.find('.');
            if (dot == std::string_view::npos) break;
            rest = rest.substr(dot + 1);
            if (auto ns = zone_.lookup(rest, dnswire::kTypeNs)) {
                delegation = ns;
                break;
            }
        }
        if (delegation) {
            resp.authorities.push_back(dnswire::ResourceRecord::ns(
                std::string(rest), delegation->value, delegation->ttl_s));
            if (auto addr = zone_.glue(delegation->value))
                resp.additionals.push_back(dnswire::ResourceRecord::address(
                    delegation->value, *addr, delegation->ttl_s));
        } else {
            resp.aa = true;
            resp.rcode = zone_.has_name(qname) ? Rcode::noerror : Rcode::nxdomain;
        }
    }
    queries_answered_.fetch_add(1, std::memory_order_relaxed);

    // population path: only well-formed EDNS-PR on an authoritative
    // address answer triggers it
    if (!answered || !query.edns_pr || query.edns_pr_malformed) return resp;

    const std::string rer_addr = query.edns_pr->rer_address.to_string();
    std::lock_guard lk(mu_);

    if (auto pending = pending_.find(sender_ip); pending != pending_.end()) {
        if (now_ms - pending->second.issued_at_ms > cfg_.proof_freshness_ms) {
            pending_.erase(pending);  // expired challenge; treat as fresh
        } else {
            // one outstanding challenge per address: no answer until resolved
            resp.answers.clear();
            resp.rcode = Rcode::refused;
            resp.edns_pr->challenge = true;
            return resp;
        }
    }

    auto ledger = ledger_.find({rer_addr, qname});
    bool within_ttl = ledger != ledger_.end() &&
                      now_ms < ledger->second.populated_at_ms + ledger->second.ttl_ms;
    if (within_ttl) {
        // a repeat within the record's TTL smells like a reflection attempt:
        // answer, but withhold the populate until a cache-miss proof arrives
        resp.edns_pr->challenge = true;
        pending_[sender_ip] =
            PendingChallenge{qname, q.qtype, rer_addr, now_ms, *answered};
        challenges_issued_.fetch_add(1, std::memory_order_relaxed);
        populates_withheld_.fetch_add(1, std::memory_order_relaxed);
    } else {
        dispatch_populate(rer_addr, *answered, now_ms);
    }
    return resp;
}

ProofVerdict AnsService::handle_proof(const MissProof& proof, const std::string& sender_ip,
                                      uint64_t now_ms) {
    auto fail = [&](ProofVerdict v) {
        proofs_invalid_.fetch_add(1, std::memory_order_relaxed);
        return v;
    };

    std::unique_lock lk(mu_);
    auto pending_it = pending_.find(sender_ip);
    if (pending_it == pending_.end()) return fail(ProofVerdict::no_pending);
    PendingChallenge pending = pending_it->second;
    lk.unlock();

    if (pir::normalize_domain(proof.domain) != pending.domain)
        return fail(ProofVerdict::no_pending);

    auto peer = cfg_.resolvers.find(pending.rer_addr);
    if (peer == cfg_.resolvers.end()) return fail(ProofVerdict::bad_signature);

    // (a) the resolver really signed exactly this (ip, time, query, response)
    auto expected = rer::transcript_message(proof.client_ip, proof.timestamp_ms,
                                            crypto::sha256(proof.query_bytes),
                                            crypto::sha256(proof.response_bytes));
    if (proof.rer_sig.message != expected || proof.client_ip != sender_ip ||
        !rer::verify_transcript(peer->second.verify_key, proof.rer_sig))
        return fail(ProofVerdict::bad_signature);

    // (b) freshness window
    if (proof.timestamp_ms + cfg_.proof_freshness_ms < now_ms ||
        proof.timestamp_ms > now_ms + 1000)
        return fail(ProofVerdict::stale);

    pir::QueryKey qk;
    pir::PirQuery query;
    pir::PirResponse response;
    try {
        qk = pir::deserialize_query_key(proof.backup_qk_bytes);
        query = pir::deserialize_query(qk.params, proof.query_bytes);
        response = pir::deserialize_response(qk.params, proof.response_bytes);
    } catch (const std::exception&) {
        return fail(ProofVerdict::malformed);
    }

    // (c) the query addresses index(domain)
    auto idx = pir::decrypted_query_index(qk, query);
    if (!idx || *idx != pir::index(pending.domain, qk.params.slot_count()))
        return fail(ProofVerdict::wrong_index);

    // (d) the decrypted slot held no fresh record for the domain at the
    // signed timestamp
    try {
        auto slot_bytes = pir::extract(qk, response);
        auto slot = cache::parse_slot(slot_bytes);
        auto found = cache::slot_find(slot, pir::domain_digest(pending.domain),
                                      pending.rtype, proof.timestamp_ms);
        if (found.status == cache::FindStatus::hit) return fail(ProofVerdict::not_a_miss);
    } catch (const pir::NoiseOverflowError&) {
        return fail(ProofVerdict::malformed);
    } catch (const std::exception&) {
        return fail(ProofVerdict::malformed);
    }

    lk.lock();
    pending_.erase(sender_ip);
    // the held populate goes out now that the miss is proven
    dispatch_populate(pending.rer_addr, pending.record, now_ms);
    lk.unlock();

    proofs_valid_.fetch_add(1, std::memory_order_relaxed);
    return ProofVerdict::valid;
}

AnsStats AnsService::stats() const {
    AnsStats s;
    s.queries_answered = queries_answered_.load();
    s.queries_refused = queries_refused_.load();
    s.challenges_issued = challenges_issued_.load();
    s.proofs_valid = proofs_valid_.load();
    s.proofs_invalid = proofs_invalid_.load();
    s.populates_scheduled = populates_scheduled_.load();
    s.populates_dispatched = scheduler_.dispatched();
    s.populates_dropped = scheduler_.dropped();
    s.populates_withheld = populates_withheld_.load();
    return s;
}

std::string AnsStats::to_json() const {
    nlohmann::json j{{"queries_answered", queries_answered},
                     {"queries_refused", queries_refused},
                     {"challenges_issued", challenges_issued},
                     {"proofs_valid", proofs_valid},
                     {"proofs_invalid", proofs_invalid},
                     {"populates_scheduled", populates_scheduled},
                     {"populates_dispatched", populates_dispatched},
                     {"populates_dropped", populates_dropped},
                     {"populates_withheld", populates_withheld}};
    return j.dump();
}

}  // namespace bdns::ans

// Cache-population path: verifies ANS signatures and zone ownership, patches
// the plaintext cache, re-encodes exactly the touched slots and publishes a
// new snapshot.

#include <chrono>
#include <set>

#include "bdns/rer/service.hpp"

namespace bdns::rer {

namespace {

cache::RecordWire to_record(const PopulateRecord& r) {
    return cache::encode_record(r.domain, static_cast<cache::RecordType>(r.rtype), r.rclass,
                                r.expire_ts_ms, r.answer, r.ans_addr);
}

}  // namespace

PopulateOutcome RerService::apply_populate(std::span<const uint8_t> msg_bytes,
                                           uint64_t now_ms) {
    auto reject = [&](std::string reason) {
        populates_rejected_.fetch_add(1, std::memory_order_relaxed);
        return PopulateOutcome{false, std::move(reason), snapshot()->version};
    };

    PopulateMsg msg;
    try {
        msg = PopulateMsg::deserialize(msg_bytes);
    } catch (const std::exception& e) {
        return reject(std::string("malformed message: ") + e.what());
    }

    const AnsEntry* sender = registry_.find_identity(msg.sender);
    if (!sender) return reject("unknown sender");
    if (!crypto::ed25519_verify(sender->verify_key, msg.canonical_bytes(), msg.signature))
        return reject("bad signature");
    if (msg.records.empty()) return reject("empty record set");

    for (const auto& r : msg.records) {
        const AnsEntry* owner = registry_.lookup_zone(r.domain);
        if (!owner || owner->identity != msg.sender)
            return reject("zone mismatch: " + r.domain);
        if (r.expire_ts_ms <= now_ms) return reject("stale record: " + r.domain);
        if (r.rtype != static_cast<uint16_t>(cache::RecordType::a) &&
            r.rtype != static_cast<uint16_t>(cache::RecordType::aaaa) &&
            r.rtype != static_cast<uint16_t>(cache::RecordType::ns))
            return reject("unsupported rtype: " + std::to_string(r.rtype));
    }

    auto start = std::chrono::steady_clock::now();

    // single writer builds the successor snapshot
    std::lock_guard writer(writer_mu_);
    auto current = snapshot();

    auto plain = std::make_shared<cache::PlainCache>(*current->plain);
    std::set<uint64_t> touched;
    try {
        for (const auto& r : msg.records) touched.insert(plain->insert(r.domain, to_record(r)));
    } catch (const std::exception& e) {
        return reject(std::string("record rejected: ") + e.what());
    }

    auto next = std::make_shared<Snapshot>();
    next->version = current->version + 1;
    next->encoded = current->encoded;  // copy, then patch the touched slots
    for (uint64_t j : touched) pir::setup_server(next->encoded, j, plain->serialized_slot(j));
    next->plain = std::move(plain);
    swap_snapshot(next);

    auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    populate_hist_.record(static_cast<uint64_t>(elapsed));
    populates_accepted_.fetch_add(1, std::memory_order_relaxed);
    return PopulateOutcome{true, {}, next->version};
}

}  // namespace bdns::rer

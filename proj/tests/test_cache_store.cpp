#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "bdns/cache/store.hpp"
#include "bdns/crypto.hpp"
#include "bdns/pir/engine.hpp"

using namespace bdns;
using namespace bdns::cache;

namespace {

RecordWire a_record(const std::string& domain, uint64_t expire_ms,
                    const std::string& answer = "192.0.2.1",
                    const std::string& ans = "192.0.2.53") {
    return encode_record(domain, RecordType::a, kClassIn, expire_ms, IpAddr::v4(answer),
                         IpAddr::v4(ans));
}

RecordWire aaaa_record(const std::string& domain, uint64_t expire_ms) {
    return encode_record(domain, RecordType::aaaa, kClassIn, expire_ms,
                         IpAddr::v6("2001:db8::1"), IpAddr::v6("2001:db8::53"));
}

}  // namespace

TEST_CASE("record layout: 38 bytes for IPv4, 62 for IPv6") {
    auto a = a_record("example.com", 1000);
    CHECK(a.wire_size() == 38);
    auto aaaa = aaaa_record("example.com", 1000);
    CHECK(aaaa.wire_size() == 62);
    auto ns = encode_record("example.com", RecordType::ns, kClassIn, 1000, std::nullopt,
                            IpAddr::v4("192.0.2.53"));
    CHECK(ns.wire_size() == 34);

    std::vector<uint8_t> buf;
    append_record(buf, a);
    CHECK(buf.size() == 38);
    auto [back, used] = parse_record(buf);
    CHECK(used == 38);
    CHECK(back == a);
    CHECK(back.answer_addr()->to_string() == "192.0.2.1");
    CHECK(back.ans_addr()->to_string() == "192.0.2.53");
}

TEST_CASE("address family must match the record type") {
    CHECK_THROWS(encode_record("x.com", RecordType::a, kClassIn, 1, IpAddr::v6("::1"),
                               IpAddr::v4("192.0.2.53")));
    CHECK_THROWS(encode_record("x.com", RecordType::aaaa, kClassIn, 1,
                               IpAddr::v4("192.0.2.1"), IpAddr::v6("::1")));
    CHECK_THROWS(encode_record("x.com", RecordType::ns, kClassIn, 1,
                               IpAddr::v4("192.0.2.1"), IpAddr::v4("192.0.2.53")));
}

TEST_CASE("slot capacity matches the layout arithmetic") {
    SUBCASE("16 KB slot holds 431 IPv4 records") {
        Slot slot;
        for (int i = 0; i < 431; ++i)
            slot_insert(slot, a_record("d" + std::to_string(i) + ".com", 1000 + i), 16384);
        CHECK(slot.records.size() == 431);
        slot_insert(slot, a_record("overflow.com", 5000), 16384);
        CHECK(slot.records.size() == 431);  // one evicted to make room
    }
    SUBCASE("16 KB slot holds 264 IPv6 records") {
        Slot slot;
        for (int i = 0; i < 264; ++i)
            slot_insert(slot, aaaa_record("d" + std::to_string(i) + ".com", 1000 + i), 16384);
        CHECK(slot.records.size() == 264);
        slot_insert(slot, aaaa_record("overflow.com", 5000), 16384);
        CHECK(slot.records.size() == 264);
    }
    SUBCASE("512 B slot holds 13 IPv4 records, 14th evicts the soonest-expiring") {
        Slot slot;
        for (int i = 0; i < 13; ++i)
            slot_insert(slot, a_record("d" + std::to_string(i) + ".com", 1000 + i), 512);
        CHECK(slot.records.size() == 13);
        slot_insert(slot, a_record("d13.com", 5000), 512);
        CHECK(slot.records.size() == 13);
        // the i=0 record (earliest expiration) is gone
        auto d0 = pir::domain_digest("d0.com");
        CHECK(slot_find(slot, d0, 1, 0).status == FindStatus::absent);
    }
}

TEST_CASE("insert keeps expiration order and upserts duplicates") {
    Slot slot;
    slot_insert(slot, a_record("a.com", 300), 512);
    slot_insert(slot, a_record("b.com", 100), 512);
    slot_insert(slot, a_record("c.com", 200), 512);
    REQUIRE(slot.records.size() == 3);
    CHECK(slot.records[0].expire_ts_ms == 100);
    CHECK(slot.records[1].expire_ts_ms == 200);
    CHECK(slot.records[2].expire_ts_ms == 300);

    // same digest+rtype replaces in place, count unchanged
    slot_insert(slot, a_record("b.com", 400, "198.51.100.7"), 512);
    CHECK(slot.records.size() == 3);
    auto found = slot_find(slot, pir::domain_digest("b.com"), 1, 0);
    REQUIRE(found.status == FindStatus::hit);
    CHECK(found.record->expire_ts_ms == 400);
    CHECK(found.record->answer_addr()->to_string() == "198.51.100.7");

    // A and AAAA for one domain coexist
    slot_insert(slot, aaaa_record("b.com", 500), 512);
    CHECK(slot.records.size() == 4);

    CHECK_THROWS(slot_insert(slot, a_record("big.com", 1), 20));
}

TEST_CASE("find classifies hit, expired and absent") {
    Slot slot;
    const uint64_t now = 1'000'000;
    slot_insert(slot, a_record("fresh.com", now + 60'000), 512);
    slot_insert(slot, a_record("stale.com", now - 1), 512);

    auto hit = slot_find(slot, pir::domain_digest("fresh.com"), 1, now);
    CHECK(hit.status == FindStatus::hit);

    auto expired = slot_find(slot, pir::domain_digest("stale.com"), 1, now);
    CHECK(expired.status == FindStatus::expired);
    REQUIRE(expired.record.has_value());  // stale record still carries the ANS address
    CHECK(expired.record->ans_addr()->to_string() == "192.0.2.53");

    CHECK(slot_find(slot, pir::domain_digest("never.com"), 1, now).status ==
          FindStatus::absent);

    // boundary: expire == now counts as expired, strictly-future is a hit
    Slot edge;
    slot_insert(edge, a_record("edge.com", now), 512);
    CHECK(slot_find(edge, pir::domain_digest("edge.com"), 1, now).status ==
          FindStatus::expired);
    CHECK(slot_find(edge, pir::domain_digest("edge.com"), 1, now - 1).status ==
          FindStatus::hit);
}

TEST_CASE("slot serialization is length-exact and round-trips mixed contents") {
    auto rng = crypto::SecureRng::seeded(40);
    for (int trial = 0; trial < 50; ++trial) {
        Slot slot;
        int n = 1 + static_cast<int>(rng.uniform(12));
        for (int i = 0; i < n; ++i) {
            std::string d = "m" + std::to_string(rng.next_u32()) + ".com";
            switch (rng.uniform(3)) {
                case 0: slot_insert(slot, a_record(d, 1 + rng.uniform(100000)), 1024); break;
                case 1: slot_insert(slot, aaaa_record(d, 1 + rng.uniform(100000)), 1024); break;
                default:
                    slot_insert(slot,
                                encode_record(d, RecordType::ns, kClassIn,
                                              1 + rng.uniform(100000), std::nullopt,
                                              IpAddr::v4("192.0.2.53")),
                                1024);
            }
        }
        auto bytes = serialize_slot(slot, 1024);
        CHECK(bytes.size() == 1024);
        CHECK(parse_slot(bytes) == slot);
    }
}

TEST_CASE("eviction order property against a sorted-list oracle") {
    // randomized insert sequences: the slot must always retain the
    // latest-expiring suffix that fits, never dropping a later-expiring
    // record while keeping an earlier one
    auto rng = crypto::SecureRng::seeded(41);
    const uint32_t slot_bytes = 512;
    const int sequences = 10'000 / 20;
    for (int s = 0; s < sequences; ++s) {
        Slot slot;
        std::vector<RecordWire> oracle;  // sorted by expiration
        for (int i = 0; i < 20; ++i) {
            auto rec = a_record("r" + std::to_string(rng.next_u32()) + ".com",
                                1 + rng.uniform(1000));
            slot_insert(slot, rec, slot_bytes);

            auto same = std::find_if(oracle.begin(), oracle.end(), [&](const RecordWire& r) {
                return r.digest == rec.digest && r.rtype == rec.rtype;
            });
            if (same != oracle.end()) oracle.erase(same);
            oracle.insert(std::upper_bound(oracle.begin(), oracle.end(), rec.expire_ts_ms,
                                           [](uint64_t ts, const RecordWire& r) {
                                               return ts < r.expire_ts_ms;
                                           }),
                          rec);
            size_t total = 0;
            for (const auto& r : oracle) total += r.wire_size();
            while (total > slot_bytes) {
                total -= oracle.front().wire_size();
                oracle.erase(oracle.begin());
            }
        }
        REQUIRE(slot.records == oracle);
        for (size_t i = 1; i < slot.records.size(); ++i)
            CHECK(slot.records[i - 1].expire_ts_ms <= slot.records[i].expire_ts_ms);
    }
}

TEST_CASE("plain cache routes records through the shared hash") {
    CacheConfig cfg{.n_slots = 64, .slot_bytes = 512};
    PlainCache cache(cfg);
    const uint64_t now = 1000;

    auto rec = a_record("routed.example", now + 5000);
    uint64_t j = cache.insert("routed.example", rec);
    CHECK(j == pir::index("routed.example", 64));

    auto hit = cache.plain_lookup_oracle("routed.example", 1, now);
    CHECK(hit.status == FindStatus::hit);
    CHECK(cache.plain_lookup_oracle("other.example", 1, now).status == FindStatus::absent);

    // colliding domains coexist in one slot
    std::string other = "c0.example";
    for (int i = 0; pir::index(other, 64) != j && i < 100000; ++i)
        other = "c" + std::to_string(i) + ".example";
    REQUIRE(pir::index(other, 64) == j);
    cache.insert(other, a_record(other, now + 9000));
    CHECK(cache.slot(j).records.size() == 2);
    CHECK(cache.plain_lookup_oracle(other, 1, now).status == FindStatus::hit);
}

TEST_CASE("empty cache oracle reports absent for any domain") {
    PlainCache cache({.n_slots = 16, .slot_bytes = 512});
    auto rng = crypto::SecureRng::seeded(42);
    for (int i = 0; i < 100; ++i) {
        std::string d = "q" + std::to_string(rng.next_u64()) + ".com";
        CHECK(cache.plain_lookup_oracle(d, 1, 0).status == FindStatus::absent);
    }
}

TEST_CASE("snapshot files restore the cache byte-identically") {
    CacheConfig cfg{.n_slots = 16, .slot_bytes = 512};
    PlainCache cache(cfg);
    cache.insert("a.example", a_record("a.example", 10'000));
    cache.insert("b.example", aaaa_record("b.example", 20'000));

    auto path = std::filesystem::temp_directory_path() / "bdns_snapshot_test.bin";
    cache.save_snapshot(path.string());
    auto loaded = PlainCache::load_snapshot(path.string());
    CHECK(loaded.config() == cfg);
    for (uint64_t j = 1; j <= cfg.n_slots; ++j)
        CHECK(loaded.serialized_slot(j) == cache.serialized_slot(j));
    std::filesystem::remove(path);
}

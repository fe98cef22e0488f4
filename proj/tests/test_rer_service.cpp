#include <doctest.h>

#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "bdns/rer/service.hpp"

using namespace bdns;
using namespace bdns::rer;

namespace {

struct Fixture {
    crypto::SigningKey rer_key = crypto::ed25519_keypair();
    crypto::SigningKey ans_key = crypto::ed25519_keypair();
    std::unique_ptr<RerService> service;
    crypto::SecureRng rng = crypto::SecureRng::seeded(60);

    explicit Fixture(uint32_t n_slots = 64, uint32_t slot_bytes = 128) {
        TrustRegistry registry;
        registry.add("workload.test", AnsEntry{"ns.workload.test", ans_key.verify, ""});
        RerConfig cfg;
        cfg.cache = {.n_slots = n_slots, .slot_bytes = slot_bytes};
        cfg.lattice_n = 64;
        service = std::make_unique<RerService>(cfg, rer_key, std::move(registry));
    }

    std::pair<pir::QueryKey, std::string> registered_client() {
        auto [qk, pk] = pir::setup_user(service->params().slot_count(), service->params(), rng);
        auto token = service->register_client(pir::serialize(pk));
        return {std::move(qk), token};
    }

    PopulateMsg populate_for(const std::string& domain, uint64_t expire_ms,
                             const std::string& answer = "192.0.2.77") {
        PopulateMsg msg;
        msg.sender = "ns.workload.test";
        msg.sent_ts_ms = 1000;
        msg.records.push_back(PopulateRecord{domain, 1, cache::kClassIn, expire_ms,
                                             cache::IpAddr::v4(answer),
                                             cache::IpAddr::v4("10.0.2.1")});
        msg.signature = crypto::ed25519_sign(ans_key, msg.canonical_bytes());
        return msg;
    }
};

}  // namespace

TEST_CASE("registration is idempotent and returns a 16-byte token") {
    Fixture fx;
    auto [qk, pk] = pir::setup_user(fx.service->params().slot_count(), fx.service->params(),
                                    fx.rng);
    auto bytes = pir::serialize(pk);
    auto t1 = fx.service->register_client(bytes);
    auto t2 = fx.service->register_client(bytes);
    CHECK(t1 == t2);
    CHECK(t1.size() == 32);  // 16 bytes hex
    CHECK(fx.service->is_registered(t1));
    CHECK(fx.service->stats().registrations == 1);
}

TEST_CASE("registration rejects mismatched parameters with the advertised config") {
    Fixture fx;
    auto rng = crypto::SecureRng::seeded(61);
    auto wrong = pir::default_params(128, 128, 1);  // wrong N
    wrong.n = 64;
    auto [qk, pk] = pir::setup_user(128, wrong, rng);
    try {
        fx.service->register_client(pir::serialize(pk));
        FAIL("expected rejection");
    } catch (const ParamsMismatchError& e) {
        auto advertised = pir::LweParams::from_json(
            nlohmann::json::parse(e.advertised_params_json).at("params").dump());
        CHECK(advertised == fx.service->params());
    }
}

TEST_CASE("handle_query answers over the populated cache and signs the transcript") {
    Fixture fx;
    auto [qk, token] = fx.registered_client();

    auto outcome = fx.service->apply_populate(
        fx.populate_for("www.workload.test", 5'000'000).serialize(), 1000);
    REQUIRE(outcome.accepted);

    uint64_t idx = pir::index("www.workload.test", fx.service->params().slot_count());
    auto q = pir::query(qk, idx, fx.rng);
    auto q_bytes = pir::serialize(fx.service->params(), q);
    auto result = fx.service->handle_query(token, q_bytes, "198.51.100.5", 2000);

    auto resp = pir::deserialize_response(fx.service->params(), result.response_bytes);
    auto slot = cache::parse_slot(pir::extract(qk, resp));
    auto found = cache::slot_find(slot, pir::domain_digest("www.workload.test"), 1, 2000);
    REQUIRE(found.status == cache::FindStatus::hit);
    CHECK(found.record->answer_addr()->to_string() == "192.0.2.77");

    SUBCASE("signature binds exactly this transcript") {
        CHECK(verify_transcript(fx.rer_key.verify, result.transcript));
        auto fields = parse_transcript_message(result.transcript.message);
        CHECK(fields.client_ip == "198.51.100.5");
        CHECK(fields.timestamp_ms == 2000);
        CHECK(fields.query_digest == crypto::sha256(q_bytes));
        CHECK(fields.response_digest == crypto::sha256(result.response_bytes));

        // flipping any message byte breaks verification
        auto tampered = result.transcript;
        tampered.message[3] ^= 0x40;
        CHECK(!verify_transcript(fx.rer_key.verify, tampered));
    }

    SUBCASE("unknown client is refused") {
        CHECK_THROWS_AS(fx.service->handle_query("deadbeef", q_bytes, "1.2.3.4", 1),
                        UnknownClientError);
    }
}

TEST_CASE("populate rejections leave the cache byte-identical") {
    Fixture fx;
    auto before = fx.service->snapshot();

    SUBCASE("unknown sender") {
        auto msg = fx.populate_for("www.workload.test", 5'000'000);
        msg.sender = "ns.evil.test";
        msg.signature = crypto::ed25519_sign(fx.ans_key, msg.canonical_bytes());
        auto out = fx.service->apply_populate(msg.serialize(), 1000);
        CHECK(!out.accepted);
        CHECK(out.reason == "unknown sender");
    }
    SUBCASE("bad signature") {
        auto msg = fx.populate_for("www.workload.test", 5'000'000);
        msg.signature[7] ^= 1;
        auto out = fx.service->apply_populate(msg.serialize(), 1000);
        CHECK(!out.accepted);
        CHECK(out.reason == "bad signature");
    }
    SUBCASE("zone mismatch: a verified ANS pushing a foreign zone is a poisoning attempt") {
        auto msg = fx.populate_for("victim.example.org", 5'000'000);
        auto out = fx.service->apply_populate(msg.serialize(), 1000);
        CHECK(!out.accepted);
        CHECK(out.reason.find("zone mismatch") == 0);
    }
    SUBCASE("stale expiration") {
        auto msg = fx.populate_for("www.workload.test", 500);
        auto out = fx.service->apply_populate(msg.serialize(), 1000);
        CHECK(!out.accepted);
        CHECK(out.reason.find("stale record") == 0);
    }

    auto after = fx.service->snapshot();
    CHECK(after->version == before->version);
    CHECK(after->encoded.digits == before->encoded.digits);
    CHECK(fx.service->stats().populates_accepted == 0);
    CHECK(fx.service->stats().populates_rejected == 1);
}

TEST_CASE("accepted populates become visible within one snapshot swap") {
    Fixture fx;
    auto [qk, token] = fx.registered_client();
    auto v0 = fx.service->snapshot()->version;

    auto out = fx.service->apply_populate(
        fx.populate_for("a.workload.test", 9'000'000).serialize(), 1000);
    REQUIRE(out.accepted);
    CHECK(out.snapshot_version == v0 + 1);

    // old queries decrypt to the new content: stateless updates
    uint64_t idx = pir::index("a.workload.test", fx.service->params().slot_count());
    auto result = fx.service->handle_query(
        token, pir::serialize(fx.service->params(), pir::query(qk, idx, fx.rng)),
        "127.0.0.1", 2000);
    auto slot = cache::parse_slot(
        pir::extract(qk, pir::deserialize_response(fx.service->params(),
                                                   result.response_bytes)));
    CHECK(cache::slot_find(slot, pir::domain_digest("a.workload.test"), 1, 2000).status ==
          cache::FindStatus::hit);
}

TEST_CASE("concurrent populates and queries always see one consistent snapshot") {
    // two records that share one slot: a torn snapshot would mix versions
    Fixture fx(16, 512);
    auto [qk, token] = fx.registered_client();

    // find two domains hashing to one slot
    std::string d1 = "x0.workload.test", d2;
    uint64_t slot1 = pir::index(d1, 16);
    for (int i = 1;; ++i) {
        std::string cand = "x" + std::to_string(i) + ".workload.test";
        if (pir::index(cand, 16) == slot1) {
            d2 = cand;
            break;
        }
    }

    std::atomic<bool> stop{false};
    std::thread writer([&] {
        for (uint64_t gen = 1; !stop.load(); ++gen) {
            // both records always carry the same generation in the answer IP
            std::string ip = "10.1." + std::to_string(gen % 250) + ".1";
            PopulateMsg msg;
            msg.sender = "ns.workload.test";
            msg.sent_ts_ms = gen;
            msg.records.push_back(PopulateRecord{d1, 1, cache::kClassIn, 9'000'000 + gen,
                                                 cache::IpAddr::v4(ip),
                                                 cache::IpAddr::v4("10.0.2.1")});
            msg.records.push_back(PopulateRecord{d2, 1, cache::kClassIn, 9'000'000 + gen,
                                                 cache::IpAddr::v4(ip),
                                                 cache::IpAddr::v4("10.0.2.1")});
            msg.signature = crypto::ed25519_sign(fx.ans_key, msg.canonical_bytes());
            REQUIRE(fx.service->apply_populate(msg.serialize(), 1000).accepted);
        }
    });

    auto rng = crypto::SecureRng::seeded(62);
    for (int i = 0; i < 25; ++i) {
        auto result = fx.service->handle_query(
            token, pir::serialize(fx.service->params(), pir::query(qk, slot1, rng)),
            "127.0.0.1", 2000);
        auto slot = cache::parse_slot(pir::extract(
            qk, pir::deserialize_response(fx.service->params(), result.response_bytes)));
        auto f1 = cache::slot_find(slot, pir::domain_digest(d1), 1, 2000);
        auto f2 = cache::slot_find(slot, pir::domain_digest(d2), 1, 2000);
        if (f1.status == cache::FindStatus::hit && f2.status == cache::FindStatus::hit) {
            // both from the same generation, never a torn mix
            CHECK(f1.record->rdata == f2.record->rdata);
            CHECK(f1.record->expire_ts_ms == f2.record->expire_ts_ms);
        }
    }
    stop.store(true);
    writer.join();
}

TEST_CASE("counters never decrease") {
    Fixture fx;
    auto [qk, token] = fx.registered_client();
    auto s0 = fx.service->stats();

    fx.service->apply_populate(fx.populate_for("b.workload.test", 9'000'000).serialize(),
                               1000);
    auto s1 = fx.service->stats();
    CHECK(s1.populates_accepted >= s0.populates_accepted);
    CHECK(s1.snapshot_version >= s0.snapshot_version);

    auto q = pir::serialize(fx.service->params(),
                            pir::query(qk, 1, fx.rng));
    fx.service->handle_query(token, q, "127.0.0.1", 1);
    auto s2 = fx.service->stats();
    CHECK(s2.queries_served == s1.queries_served + 1);
    CHECK(s2.registrations >= s1.registrations);
}

TEST_CASE("noise-margin gate refuses unservable configurations") {
    TrustRegistry registry;
    RerConfig cfg;
    cfg.cache = {.n_slots = 64, .slot_bytes = 128};
    cfg.lattice_n = 64;
    auto key = crypto::ed25519_keypair();
    CHECK_NOTHROW(RerService(cfg, key, registry));

    // shrinking q until the plaintext modulus eats the noise budget must be
    // refused at startup
    RerConfig bad = cfg;
    bad.q_bits = 16;
    CHECK(pir::noise_margin(
              [&] {
                  auto p = pir::default_params(bad.cache.n_slots, 128, 1);
                  p.n = 64;
                  p.q_bits = 16;
                  return p;
              }(),
              bad.cache.n_slots) < 0);
    CHECK_THROWS_AS(RerService(bad, key, registry), std::invalid_argument);
}

TEST_CASE("restart counter persists across service restarts") {
    Fixture fx;  // unrelated instance keeps the fixture helpers alive
    auto path = std::string("/tmp/bdns_restart_counter_test");
    std::remove(path.c_str());

    TrustRegistry registry;
    RerConfig cfg;
    cfg.cache = {.n_slots = 16, .slot_bytes = 128};
    cfg.lattice_n = 64;
    auto key = crypto::ed25519_keypair();
    {
        RerService first(cfg, key, registry, path);
        CHECK(first.stats().restart_count == 1);
    }
    {
        RerService second(cfg, key, registry, path);
        CHECK(second.stats().restart_count == 2);
    }
    std::remove(path.c_str());
}

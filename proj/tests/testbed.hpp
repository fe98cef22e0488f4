#pragma once

// In-process three-tier testbed shared by the service and end-to-end suites:
// a blind resolver, root/TLD/final authoritative servers wired through real
// HTTP on loopback, and helpers to build clients against them.

#include <memory>
#include <string>

#include "bdns/ans/http.hpp"
#include "bdns/ans/service.hpp"
#include "bdns/client/proxy.hpp"
#include "bdns/rer/http.hpp"
#include "bdns/rer/service.hpp"

namespace testbed {

using namespace bdns;

struct RerNode {
    std::unique_ptr<rer::RerService> service;
    std::unique_ptr<rer::RerHttpServer> http;
    std::string url;
    std::string identity_addr = "10.9.9.9";
};

struct AnsNode {
    std::unique_ptr<ans::AnsService> service;
    std::unique_ptr<ans::AnsHttpServer> http;
    std::string url;
    crypto::SigningKey key;
};

inline ans::PopulateScheduler::Transport http_populate_transport() {
    return [](const std::string& endpoint, const rer::PopulateMsg& msg) {
        net::HttpChannel channel(endpoint);
        auto bytes = msg.serialize();
        auto res = channel.post("/v1/populate",
                                {reinterpret_cast<const char*>(bytes.data()), bytes.size()},
                                "application/octet-stream");
        return res.status == 200;
    };
}

inline AnsNode make_ans(ans::AnsConfig cfg, ans::ZoneData zone, crypto::SigningKey key) {
    AnsNode node;
    node.key = key;
    node.service = std::make_unique<ans::AnsService>(std::move(cfg), node.key,
                                                     std::move(zone),
                                                     http_populate_transport());
    node.http = std::make_unique<ans::AnsHttpServer>(*node.service);
    int port = node.http->start("127.0.0.1", 0);
    node.url = "http://127.0.0.1:" + std::to_string(port);
    return node;
}

struct Testbed {
    RerNode rer;
    AnsNode root, tld, final_ans;

    client::ClientConfig client_config() const {
        client::ClientConfig cfg;
        cfg.resolver_url = rer.url;
        cfg.resolver_addr = rer.identity_addr;
        cfg.root_url = root.url;
        cfg.tld_url = tld.url;
        cfg.ans_endpoints["10.0.2.1"] = final_ans.url;
        return cfg;
    }
};

// leaf_ttl_s controls how fast final-zone records expire
inline Testbed make_testbed(uint32_t n_slots = 256, uint32_t slot_bytes = 128,
                            uint32_t leaf_ttl_s = 60, uint32_t n_leaves = 8,
                            DelayDistribution populate_delay = DelayDistribution::fixed(0)) {
    Testbed tb;
    auto final_key = crypto::ed25519_keypair();

    rer::TrustRegistry registry;
    registry.add("workload.test",
                 rer::AnsEntry{"ns.workload.test", final_key.verify, ""});

    rer::RerConfig rer_cfg;
    rer_cfg.cache = {.n_slots = n_slots, .slot_bytes = slot_bytes};
    rer_cfg.lattice_n = 64;
    rer_cfg.max_inflight_queries = 4;
    tb.rer.service = std::make_unique<rer::RerService>(rer_cfg, crypto::ed25519_keypair(),
                                                       std::move(registry));
    tb.rer.http = std::make_unique<rer::RerHttpServer>(*tb.rer.service);
    int port = tb.rer.http->start("127.0.0.1", 0);
    tb.rer.url = "http://127.0.0.1:" + std::to_string(port);

    // final zone: h<i>.workload.test
    ans::ZoneData final_zone({"workload.test"});
    for (uint32_t i = 0; i < n_leaves; ++i)
        final_zone.add({"h" + std::to_string(i) + ".workload.test", dnswire::kTypeA,
                        "192.0.2." + std::to_string(10 + i), leaf_ttl_s});

    ans::AnsConfig final_cfg;
    final_cfg.identity = "ns.workload.test";
    final_cfg.public_addr = cache::IpAddr::v4("10.0.2.1");
    final_cfg.populate_delay = populate_delay;
    final_cfg.resolvers[tb.rer.identity_addr] =
        ans::ResolverPeer{tb.rer.service->verify_key(), tb.rer.url};
    tb.final_ans = make_ans(final_cfg, std::move(final_zone), final_key);

    ans::ZoneData tld_zone({"test"});
    tld_zone.add({"workload.test", dnswire::kTypeNs, "ns.workload.test", 3600});
    tld_zone.add({"ns.workload.test", dnswire::kTypeA, "10.0.2.1", 3600});
    ans::AnsConfig tld_cfg;
    tld_cfg.identity = "ns.tld.test";
    tld_cfg.public_addr = cache::IpAddr::v4("10.0.1.1");
    tb.tld = make_ans(tld_cfg, std::move(tld_zone), crypto::ed25519_keypair());

    ans::ZoneData root_zone({"."});
    root_zone.add({"test", dnswire::kTypeNs, "ns.tld.test", 3600});
    root_zone.add({"ns.tld.test", dnswire::kTypeA, "10.0.1.1", 3600});
    ans::AnsConfig root_cfg;
    root_cfg.identity = "ns.root";
    root_cfg.public_addr = cache::IpAddr::v4("10.0.0.1");
    tb.root = make_ans(root_cfg, std::move(root_zone), crypto::ed25519_keypair());

    return tb;
}

}  // namespace testbed

#include <doctest.h>

#include "bdns/dnswire/message.hpp"

using namespace bdns;
using namespace bdns::dnswire;

TEST_CASE("query message with EDNS-PR round-trips") {
    Message m;
    m.id = 0x1234;
    m.rd = false;
    m.questions.push_back({"www.example.com", kTypeA, kClassIn});
    m.has_edns = true;
    m.edns_pr = EdnsPr{cache::IpAddr::v4("203.0.113.9"), false};

    auto bytes = m.encode();
    auto back = Message::parse(bytes);
    CHECK(back.id == 0x1234);
    CHECK(!back.qr);
    REQUIRE(back.questions.size() == 1);
    CHECK(back.questions[0].qname == "www.example.com");
    CHECK(back.questions[0].qtype == kTypeA);
    REQUIRE(back.edns_pr.has_value());
    CHECK(back.edns_pr->rer_address.to_string() == "203.0.113.9");
    CHECK(!back.edns_pr->challenge);
}

TEST_CASE("challenge flag survives the round trip") {
    Message m;
    m.qr = true;
    m.aa = true;
    m.questions.push_back({"x.test", kTypeA, kClassIn});
    m.answers.push_back(ResourceRecord::address("x.test", cache::IpAddr::v4("192.0.2.8"), 60));
    m.has_edns = true;
    m.edns_pr = EdnsPr{cache::IpAddr::v6("2001:db8::1"), true};

    auto back = Message::parse(m.encode());
    CHECK(back.aa);
    REQUIRE(back.edns_pr.has_value());
    CHECK(back.edns_pr->challenge);
    CHECK(back.edns_pr->rer_address.family == 6);
    REQUIRE(back.answers.size() == 1);
    CHECK(back.answers[0].rdata_as_ip().to_string() == "192.0.2.8");
}

TEST_CASE("referral with NS and glue records") {
    Message m;
    m.qr = true;
    m.questions.push_back({"example.com", kTypeNs, kClassIn});
    m.authorities.push_back(ResourceRecord::ns("com", "ns.nic.com", 3600));
    m.additionals.push_back(
        ResourceRecord::address("ns.nic.com", cache::IpAddr::v4("10.0.1.1"), 3600));

    auto back = Message::parse(m.encode());
    REQUIRE(back.authorities.size() == 1);
    CHECK(back.authorities[0].rdata_as_name() == "ns.nic.com");
    REQUIRE(back.additionals.size() == 1);
    CHECK(back.additionals[0].rdata_as_ip().to_string() == "10.0.1.1");
}

TEST_CASE("messages without EDNS parse with no option") {
    Message m;
    m.questions.push_back({"plain.test", kTypeA, kClassIn});
    auto back = Message::parse(m.encode());
    CHECK(!back.has_edns);
    CHECK(!back.edns_pr.has_value());
}

TEST_CASE("rcode values survive encoding") {
    for (auto rc : {Rcode::noerror, Rcode::nxdomain, Rcode::notimp, Rcode::refused}) {
        Message m;
        m.qr = true;
        m.rcode = rc;
        CHECK(Message::parse(m.encode()).rcode == rc);
    }
}

TEST_CASE("malformed inputs throw instead of crashing") {
    std::vector<uint8_t> junk = {0x12, 0x34, 0x00};
    CHECK_THROWS_AS(Message::parse(junk), ParseError);

    Message m;
    m.questions.push_back({"ok.test", kTypeA, kClassIn});
    auto bytes = m.encode();
    bytes.resize(bytes.size() - 3);  // truncate the question
    CHECK_THROWS_AS(Message::parse(bytes), ParseError);

    // a bad EDNS-PR option is flagged, not fatal: the query must still be
    // answerable (just never populated)
    Message e;
    e.questions.push_back({"ok.test", kTypeA, kClassIn});
    e.has_edns = true;
    e.edns_pr = EdnsPr{cache::IpAddr::v4("192.0.2.1"), false};
    auto eb = e.encode();
    eb[eb.size() - 6] = 9;  // family byte of the EDNS-PR payload
    auto parsed = Message::parse(eb);
    CHECK(parsed.edns_pr_malformed);
    CHECK(!parsed.edns_pr.has_value());
    REQUIRE(parsed.questions.size() == 1);
}

TEST_CASE("compression pointers in foreign messages are followed") {
    // hand-built response: question "a.b" + answer name as pointer to it
    std::vector<uint8_t> raw = {
        0x00, 0x01, 0x80, 0x00, 0x00, 0x01, 0x00, 0x01, 0x00, 0x00, 0x00, 0x00,
        // question: a.b A IN
        0x01, 'a', 0x01, 'b', 0x00, 0x00, 0x01, 0x00, 0x01,
        // answer: pointer to offset 12, A IN ttl=1 rdlen=4
        0xc0, 0x0c, 0x00, 0x01, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x00, 0x04,
        192, 0, 2, 1};
    auto m = Message::parse(raw);
    REQUIRE(m.answers.size() == 1);
    CHECK(m.answers[0].name == "a.b");
    CHECK(m.answers[0].rdata_as_ip().to_string() == "192.0.2.1");
}

#include "bdns/rer/protocol.hpp"

#include <algorithm>

#include "bdns/wire.hpp"

namespace bdns::rer {

bool zone_contains(std::string_view zone, std::string_view domain) {
    if (domain.size() < zone.size()) return false;
    if (!std::equal(zone.rbegin(), zone.rend(), domain.rbegin(),
                    [](char a, char b) { return std::tolower(a) == std::tolower(b); }))
        return false;
    return domain.size() == zone.size() || domain[domain.size() - zone.size() - 1] == '.';
}

void TrustRegistry::add(const std::string& zone, AnsEntry entry) {
    zones_[zone] = std::move(entry);
}

const AnsEntry* TrustRegistry::lookup_zone(std::string_view domain) const {
    const AnsEntry* best = nullptr;
    size_t best_len = 0;
    for (const auto& [zone, entry] : zones_) {
        if (zone_contains(zone, domain) && zone.size() >= best_len) {
            best = &entry;
            best_len = zone.size();
        }
    }
    return best;
}

const AnsEntry* TrustRegistry::find_identity(std::string_view identity) const {
    for (const auto& [zone, entry] : zones_)
        if (entry.identity == identity) return &entry;
    return nullptr;
}

namespace {

void write_record(wire::Writer& w, const PopulateRecord& r) {
    w.str(r.domain);
    w.u16(r.rtype);
    w.u16(r.rclass);
    w.u64(r.expire_ts_ms);
    if (r.answer) {
        w.u8(1);
        w.blob(r.answer->view());
    } else {
        w.u8(0);
    }
    w.blob(r.ans_addr.view());
}

PopulateRecord read_record(wire::Reader& rd) {
    PopulateRecord r;
    r.domain = rd.str();
    r.rtype = rd.u16();
    r.rclass = rd.u16();
    r.expire_ts_ms = rd.u64();
    if (rd.u8() == 1) r.answer = cache::IpAddr::from_bytes(rd.blob());
    r.ans_addr = cache::IpAddr::from_bytes(rd.blob());
    return r;
}

}  // namespace

std::vector<uint8_t> PopulateMsg::canonical_bytes() const {
    wire::Writer w;
    w.str(sender);
    w.u64(sent_ts_ms);
    w.u32(static_cast<uint32_t>(records.size()));
    for (const auto& r : records) write_record(w, r);
    return w.take();
}

std::vector<uint8_t> PopulateMsg::serialize() const {
    wire::Writer w;
    w.header(wire::ObjectTag::populate_msg);
    auto body = canonical_bytes();
    w.blob(body);
    w.bytes(signature);
    return w.take();
}

PopulateMsg PopulateMsg::deserialize(std::span<const uint8_t> data) {
    wire::Reader rd(data);
    rd.header(wire::ObjectTag::populate_msg);
    auto body = rd.blob();
    PopulateMsg msg;
    {
        wire::Reader br(body);
        msg.sender = br.str();
        msg.sent_ts_ms = br.u64();
        uint32_t count = br.u32();
        msg.records.reserve(count);
        for (uint32_t i = 0; i < count; ++i) msg.records.push_back(read_record(br));
        if (!br.done()) throw wire::WireError("trailing bytes in populate body");
    }
    auto sig = rd.bytes(64);
    std::copy(sig.begin(), sig.end(), msg.signature.begin());
    if (!rd.done()) throw wire::WireError("trailing bytes after populate message");
    return msg;
}

std::vector<uint8_t> transcript_message(std::string_view client_ip, uint64_t timestamp_ms,
                                        const crypto::Sha256Digest& query_digest,
                                        const crypto::Sha256Digest& response_digest) {
    wire::Writer w;
    w.str(client_ip);
    w.u64(timestamp_ms);
    w.bytes(query_digest);
    w.bytes(response_digest);
    return w.take();
}

std::vector<uint8_t> TranscriptSignature::serialize() const {
    wire::Writer w;
    w.header(wire::ObjectTag::transcript_sig);
    w.bytes(signer);
    w.blob(message);
    w.bytes(signature);
    return w.take();
}

TranscriptSignature TranscriptSignature::deserialize(std::span<const uint8_t> data) {
    wire::Reader rd(data);
    rd.header(wire::ObjectTag::transcript_sig);
    TranscriptSignature sig;
    auto id = rd.bytes(8);
    std::copy(id.begin(), id.end(), sig.signer.begin());
    auto msg = rd.blob();
    sig.message.assign(msg.begin(), msg.end());
    auto s = rd.bytes(64);
    std::copy(s.begin(), s.end(), sig.signature.begin());
    if (!rd.done()) throw wire::WireError("trailing bytes after transcript signature");
    return sig;
}

TranscriptFields parse_transcript_message(std::span<const uint8_t> message) {
    wire::Reader rd(message);
    TranscriptFields f;
    f.client_ip = rd.str();
    f.timestamp_ms = rd.u64();
    auto qd = rd.bytes(32);
    std::copy(qd.begin(), qd.end(), f.query_digest.begin());
    auto rdg = rd.bytes(32);
    std::copy(rdg.begin(), rdg.end(), f.response_digest.begin());
    if (!rd.done()) throw wire::WireError("trailing bytes in transcript message");
    return f;
}

bool verify_transcript(const std::array<uint8_t, 32>& verify_key,
                       const TranscriptSignature& sig) {
    return crypto::ed25519_verify(verify_key, sig.message, sig.signature);
}

}  // namespace bdns::rer

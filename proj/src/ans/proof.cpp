#include "bdns/ans/proof.hpp"

#include "bdns/wire.hpp"

namespace bdns::ans {

std::vector<uint8_t> MissProof::serialize() const {
    wire::Writer w;
    w.header(wire::ObjectTag::miss_proof);
    w.blob(query_bytes);
    w.blob(response_bytes);
    w.blob(backup_qk_bytes);
    w.blob(rer_sig.serialize());
    w.str(client_ip);
    w.u64(timestamp_ms);
    w.str(domain);
    return w.take();
}

MissProof MissProof::deserialize(std::span<const uint8_t> data) {
    wire::Reader r(data);
    r.header(wire::ObjectTag::miss_proof);
    MissProof p;
    auto q = r.blob();
    p.query_bytes.assign(q.begin(), q.end());
    auto resp = r.blob();
    p.response_bytes.assign(resp.begin(), resp.end());
    auto qk = r.blob();
    p.backup_qk_bytes.assign(qk.begin(), qk.end());
    p.rer_sig = rer::TranscriptSignature::deserialize(r.blob());
    p.client_ip = r.str();
    p.timestamp_ms = r.u64();
    p.domain = r.str();
    if (!r.done()) throw wire::WireError("trailing bytes after miss proof");
    return p;
}

std::string_view to_string(ProofVerdict v) {
    switch (v) {
        case ProofVerdict::valid: return "valid";
        case ProofVerdict::malformed: return "malformed";
        case ProofVerdict::bad_signature: return "bad-signature";
        case ProofVerdict::stale: return "stale";
        case ProofVerdict::wrong_index: return "wrong-index";
        case ProofVerdict::not_a_miss: return "not-a-miss";
        case ProofVerdict::no_pending: return "no-pending-challenge";
    }
    return "unknown";
}

}  // namespace bdns::ans

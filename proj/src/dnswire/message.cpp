#include "bdns/dnswire/message.hpp"

#include <algorithm>

namespace bdns::dnswire {

namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_name(std::vector<uint8_t>& out, const std::string& name) {
    size_t start = 0;
    while (start < name.size()) {
        size_t dot = name.find('.', start);
        size_t end = dot == std::string::npos ? name.size() : dot;
        size_t len = end - start;
        if (len == 0 || len > 63) throw ParseError("bad label length in " + name);
        out.push_back(static_cast<uint8_t>(len));
        out.insert(out.end(), name.begin() + start, name.begin() + end);
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    out.push_back(0);
}

class Cursor {
public:
    Cursor(std::span<const uint8_t> data, size_t pos = 0) : data_(data), pos_(pos) {}

    uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | data_[pos_ + i];
        pos_ += 4;
        return v;
    }
    std::vector<uint8_t> bytes(size_t n) {
        need(n);
        std::vector<uint8_t> out(data_.begin() + pos_, data_.begin() + pos_ + n);
        pos_ += n;
        return out;
    }

    // standard label sequence with compression-pointer support
    std::string name() {
        std::string out;
        size_t pos = pos_;
        bool jumped = false;
        int jumps = 0;
        while (true) {
            if (pos >= data_.size()) throw ParseError("name runs past message end");
            uint8_t len = data_[pos];
            if ((len & 0xc0) == 0xc0) {
                if (pos + 1 >= data_.size()) throw ParseError("truncated pointer");
                if (++jumps > 32) throw ParseError("compression loop");
                size_t target = static_cast<size_t>(len & 0x3f) << 8 | data_[pos + 1];
                if (!jumped) pos_ = pos + 2;
                jumped = true;
                pos = target;
                continue;
            }
            if (len > 63) throw ParseError("bad label length");
            if (len == 0) {
                if (!jumped) pos_ = pos + 1;
                return out;
            }
            if (pos + 1 + len > data_.size()) throw ParseError("label past end");
            if (!out.empty()) out.push_back('.');
            out.append(reinterpret_cast<const char*>(&data_[pos + 1]), len);
            pos += 1 + len;
        }
    }

    size_t pos() const { return pos_; }

private:
    void need(size_t n) const {
        if (data_.size() - pos_ < n) throw ParseError("truncated message");
    }

    std::span<const uint8_t> data_;
    size_t pos_;
};

ResourceRecord parse_rr(Cursor& c) {
    ResourceRecord rr;
    rr.name = c.name();
    rr.rtype = c.u16();
    rr.rclass = c.u16();
    rr.ttl = c.u32();
    uint16_t rdlength = c.u16();
    rr.rdata = c.bytes(rdlength);
    return rr;
}

void encode_rr(std::vector<uint8_t>& out, const ResourceRecord& rr) {
    put_name(out, rr.name);
    put_u16(out, rr.rtype);
    put_u16(out, rr.rclass);
    put_u32(out, rr.ttl);
    put_u16(out, static_cast<uint16_t>(rr.rdata.size()));
    out.insert(out.end(), rr.rdata.begin(), rr.rdata.end());
}

}  // namespace

ResourceRecord ResourceRecord::address(const std::string& name, const cache::IpAddr& ip,
                                       uint32_t ttl) {
    ResourceRecord rr;
    rr.name = name;
    rr.rtype = ip.family == 4 ? kTypeA : kTypeAaaa;
    rr.ttl = ttl;
    auto v = ip.view();
    rr.rdata.assign(v.begin(), v.end());
    return rr;
}

ResourceRecord ResourceRecord::ns(const std::string& zone, const std::string& ns_name,
                                  uint32_t ttl) {
    ResourceRecord rr;
    rr.name = zone;
    rr.rtype = kTypeNs;
    rr.ttl = ttl;
    put_name(rr.rdata, ns_name);
    return rr;
}

std::string ResourceRecord::rdata_as_name() const {
    Cursor c(rdata);
    return c.name();
}

cache::IpAddr ResourceRecord::rdata_as_ip() const { return cache::IpAddr::from_bytes(rdata); }

std::vector<uint8_t> Message::encode() const {
    std::vector<uint8_t> out;
    put_u16(out, id);
    uint16_t flags = 0;
    if (qr) flags |= 0x8000;
    flags |= static_cast<uint16_t>((opcode & 0xf) << 11);
    if (aa) flags |= 0x0400;
    if (tc) flags |= 0x0200;
    if (rd) flags |= 0x0100;
    if (ra) flags |= 0x0080;
    flags |= static_cast<uint16_t>(rcode) & 0xf;
    put_u16(out, flags);
    put_u16(out, static_cast<uint16_t>(questions.size()));
    put_u16(out, static_cast<uint16_t>(answers.size()));
    put_u16(out, static_cast<uint16_t>(authorities.size()));
    put_u16(out, static_cast<uint16_t>(additionals.size() + (has_edns ? 1 : 0)));

    for (const auto& q : questions) {
        put_name(out, q.qname);
        put_u16(out, q.qtype);
        put_u16(out, q.qclass);
    }
    for (const auto& rr : answers) encode_rr(out, rr);
    for (const auto& rr : authorities) encode_rr(out, rr);
    for (const auto& rr : additionals) encode_rr(out, rr);

    if (has_edns) {
        out.push_back(0);  // root name
        put_u16(out, kTypeOpt);
        put_u16(out, edns_udp_size);
        put_u32(out, 0);  // extended rcode + version + flags
        std::vector<uint8_t> opts;
        if (edns_pr) {
            put_u16(opts, kEdnsPrOptionCode);
            auto addr = edns_pr->rer_address.view();
            put_u16(opts, static_cast<uint16_t>(2 + addr.size()));
            opts.push_back(edns_pr->family_code());
            opts.push_back(edns_pr->challenge ? kEdnsPrChallengeFlag : 0);
            opts.insert(opts.end(), addr.begin(), addr.end());
        }
        put_u16(out, static_cast<uint16_t>(opts.size()));
        out.insert(out.end(), opts.begin(), opts.end());
    }
    return out;
}

Message Message::parse(std::span<const uint8_t> data) {
    Cursor c(data);
    Message m;
    m.id = c.u16();
    uint16_t flags = c.u16();
    m.qr = flags & 0x8000;
    m.opcode = static_cast<uint8_t>((flags >> 11) & 0xf);
    m.aa = flags & 0x0400;
    m.tc = flags & 0x0200;
    m.rd = flags & 0x0100;
    m.ra = flags & 0x0080;
    m.rcode = static_cast<Rcode>(flags & 0xf);

    uint16_t qd = c.u16(), an = c.u16(), ns = c.u16(), ar = c.u16();
    for (int i = 0; i < qd; ++i) {
        Question q;
        q.qname = c.name();
        q.qtype = c.u16();
        q.qclass = c.u16();
        m.questions.push_back(std::move(q));
    }
    for (int i = 0; i < an; ++i) m.answers.push_back(parse_rr(c));
    for (int i = 0; i < ns; ++i) m.authorities.push_back(parse_rr(c));
    for (int i = 0; i < ar; ++i) {
        auto rr = parse_rr(c);
        if (rr.rtype != kTypeOpt) {
            m.additionals.push_back(std::move(rr));
            continue;
        }
        m.has_edns = true;
        m.edns_udp_size = rr.rclass;  // OPT reuses the class field
        Cursor oc(rr.rdata);
        while (oc.pos() + 4 <= rr.rdata.size()) {
            uint16_t code = oc.u16();
            uint16_t len = oc.u16();
            auto body = oc.bytes(len);
            if (code != kEdnsPrOptionCode) continue;
            if (len < 2) {
                m.edns_pr_malformed = true;
                continue;
            }
            uint8_t family = body[0];
            size_t want = family == 1 ? 4 : 16;
            if ((family != 1 && family != 2) || body.size() != 2 + want) {
                m.edns_pr_malformed = true;
                continue;
            }
            EdnsPr pr;
            pr.challenge = body[1] & kEdnsPrChallengeFlag;
            pr.rer_address =
                cache::IpAddr::from_bytes({body.data() + 2, body.size() - 2});
            m.edns_pr = pr;
        }
    }
    return m;
}

}  // namespace bdns::dnswire

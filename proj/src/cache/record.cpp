#include "bdns/cache/record.hpp"

#include <arpa/inet.h>

#include <atomic>
#include <cstring>
#include <stdexcept>

#include "bdns/pir/engine.hpp"

namespace bdns::cache {

namespace {

std::atomic<uint64_t> g_decode_count{0};

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint16_t get_u16(const uint8_t* p) { return static_cast<uint16_t>(p[0] << 8 | p[1]); }

uint64_t get_u64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | p[i];
    return v;
}

}  // namespace

IpAddr IpAddr::v4(std::string_view dotted) {
    IpAddr out;
    out.family = 4;
    std::string s(dotted);
    if (inet_pton(AF_INET, s.c_str(), out.bytes.data()) != 1)
        throw std::invalid_argument("bad IPv4 address: " + s);
    return out;
}

IpAddr IpAddr::v6(std::string_view text) {
    IpAddr out;
    out.family = 6;
    std::string s(text);
    if (inet_pton(AF_INET6, s.c_str(), out.bytes.data()) != 1)
        throw std::invalid_argument("bad IPv6 address: " + s);
    return out;
}

IpAddr IpAddr::parse(std::string_view text) {
    return text.find(':') != std::string_view::npos ? v6(text) : v4(text);
}

IpAddr IpAddr::from_bytes(std::span<const uint8_t> raw) {
    IpAddr out;
    if (raw.size() == 4)
        out.family = 4;
    else if (raw.size() == 16)
        out.family = 6;
    else
        throw std::invalid_argument("address must be 4 or 16 bytes");
    std::memcpy(out.bytes.data(), raw.data(), raw.size());
    return out;
}

std::string IpAddr::to_string() const {
    char buf[INET6_ADDRSTRLEN] = {};
    if (family == 4)
        inet_ntop(AF_INET, bytes.data(), buf, sizeof buf);
    else
        inet_ntop(AF_INET6, bytes.data(), buf, sizeof buf);
    return buf;
}

std::optional<IpAddr> RecordWire::answer_addr() const {
    if (rtype == static_cast<uint16_t>(RecordType::ns)) return std::nullopt;
    size_t half = rdata.size() / 2;
    if (half != 4 && half != 16) return std::nullopt;
    return IpAddr::from_bytes({rdata.data(), half});
}

std::optional<IpAddr> RecordWire::ans_addr() const {
    if (rtype == static_cast<uint16_t>(RecordType::ns)) {
        if (rdata.size() != 4 && rdata.size() != 16) return std::nullopt;
        return IpAddr::from_bytes(rdata);
    }
    size_t half = rdata.size() / 2;
    if (half != 4 && half != 16) return std::nullopt;
    return IpAddr::from_bytes({rdata.data() + half, half});
}

RecordWire encode_record(std::string_view domain, RecordType rtype, uint16_t rclass,
                         uint64_t expire_ts_ms, const std::optional<IpAddr>& answer_ip,
                         const IpAddr& ans_ip) {
    RecordWire rec;
    rec.digest = pir::domain_digest(domain);
    rec.rtype = static_cast<uint16_t>(rtype);
    rec.rclass = rclass;
    rec.expire_ts_ms = expire_ts_ms;

    switch (rtype) {
        case RecordType::a:
            if (!answer_ip || answer_ip->family != 4 || ans_ip.family != 4)
                throw std::invalid_argument("A record requires IPv4 answer and ANS addresses");
            break;
        case RecordType::aaaa:
            if (!answer_ip || answer_ip->family != 6 || ans_ip.family != 6)
                throw std::invalid_argument("AAAA record requires IPv6 answer and ANS addresses");
            break;
        case RecordType::ns:
            if (answer_ip)
                throw std::invalid_argument("NS record carries only the ANS address");
            break;
    }
    if (answer_ip) {
        auto v = answer_ip->view();
        rec.rdata.assign(v.begin(), v.end());
    }
    auto v = ans_ip.view();
    rec.rdata.insert(rec.rdata.end(), v.begin(), v.end());
    return rec;
}

void append_record(std::vector<uint8_t>& out, const RecordWire& rec) {
    out.insert(out.end(), rec.digest.begin(), rec.digest.end());
    put_u16(out, rec.rtype);
    put_u16(out, rec.rclass);
    put_u64(out, rec.expire_ts_ms);
    put_u16(out, static_cast<uint16_t>(rec.rdata.size()));
    out.insert(out.end(), rec.rdata.begin(), rec.rdata.end());
}

std::pair<RecordWire, size_t> parse_record(std::span<const uint8_t> data) {
    g_decode_count.fetch_add(1, std::memory_order_relaxed);
    if (data.size() < RecordWire::kHeaderSize)
        throw std::invalid_argument("truncated record header");
    RecordWire rec;
    std::memcpy(rec.digest.data(), data.data(), 16);
    rec.rtype = get_u16(data.data() + 16);
    rec.rclass = get_u16(data.data() + 18);
    rec.expire_ts_ms = get_u64(data.data() + 20);
    uint16_t rdlength = get_u16(data.data() + 28);
    if (data.size() < RecordWire::kHeaderSize + rdlength)
        throw std::invalid_argument("truncated rdata");
    rec.rdata.assign(data.begin() + RecordWire::kHeaderSize,
                     data.begin() + RecordWire::kHeaderSize + rdlength);
    return {std::move(rec), RecordWire::kHeaderSize + rdlength};
}

uint64_t record_decode_count() { return g_decode_count.load(std::memory_order_relaxed); }

}  // namespace bdns::cache

#include "bdns/cache/store.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <stdexcept>

#include "bdns/pir/engine.hpp"
#include "bdns/wire.hpp"

namespace bdns::cache {

size_t Slot::packed_size() const {
    size_t total = 0;
    for (const auto& r : records) total += r.wire_size();
    return total;
}

void slot_insert(Slot& slot, RecordWire rec, uint32_t slot_bytes) {
    if (rec.rtype == 0) throw std::invalid_argument("rtype 0 is reserved");
    if (rec.wire_size() > slot_bytes)
        throw std::invalid_argument("record larger than slot capacity");

    auto same = std::find_if(slot.records.begin(), slot.records.end(), [&](const RecordWire& r) {
        return r.digest == rec.digest && r.rtype == rec.rtype;
    });
    if (same != slot.records.end()) slot.records.erase(same);

    auto pos = std::upper_bound(slot.records.begin(), slot.records.end(), rec.expire_ts_ms,
                                [](uint64_t ts, const RecordWire& r) { return ts < r.expire_ts_ms; });
    slot.records.insert(pos, std::move(rec));

    // evict from the soon-to-expire end until everything fits
    while (slot.packed_size() > slot_bytes) slot.records.erase(slot.records.begin());
}

FindResult slot_find(const Slot& slot, const std::array<uint8_t, 16>& digest,
                     uint16_t rtype, uint64_t now_ms) {
    for (const auto& r : slot.records) {
        if (r.digest != digest || r.rtype != rtype) continue;
        FindResult out;
        out.record = r;
        out.status = r.expire_ts_ms > now_ms ? FindStatus::hit : FindStatus::expired;
        return out;
    }
    return {};
}

std::vector<uint8_t> serialize_slot(const Slot& slot, uint32_t slot_bytes) {
    std::vector<uint8_t> out;
    out.reserve(slot_bytes);
    for (const auto& r : slot.records) append_record(out, r);
    if (out.size() > slot_bytes) throw std::length_error("slot overflows capacity");
    out.resize(slot_bytes, 0);
    return out;
}

Slot parse_slot(std::span<const uint8_t> data) {
    Slot slot;
    size_t pos = 0;
    while (data.size() - pos >= RecordWire::kHeaderSize) {
        // zeroed rtype terminates the packed region
        if (data[pos + 16] == 0 && data[pos + 17] == 0) break;
        auto [rec, used] = parse_record(data.subspan(pos));
        pos += used;
        slot.records.push_back(std::move(rec));
    }
    return slot;
}

void CacheConfig::validate() const {
    if (n_slots == 0 || !std::has_single_bit(n_slots))
        throw std::invalid_argument("n_slots must be a power of two");
    if (slot_bytes < RecordWire::kHeaderSize + 8)
        throw std::invalid_argument("slot_bytes too small for any record");
}

PlainCache::PlainCache(CacheConfig cfg) : cfg_(cfg), slots_(cfg.n_slots) {
    cfg_.validate();
}

uint64_t PlainCache::slot_index(std::string_view domain) const {
    return pir::index(domain, cfg_.n_slots);
}

uint64_t PlainCache::insert(std::string_view domain, const RecordWire& rec) {
    uint64_t j = pir::index_from_digest(rec.digest, cfg_.n_slots);
    insert_at(j, rec);
    return j;
}

void PlainCache::insert_at(uint64_t j, const RecordWire& rec) {
    if (j < 1 || j > cfg_.n_slots) throw std::out_of_range("slot index out of range");
    slot_insert(slots_[j - 1], rec, cfg_.slot_bytes);
}

const Slot& PlainCache::slot(uint64_t j) const {
    if (j < 1 || j > cfg_.n_slots) throw std::out_of_range("slot index out of range");
    return slots_[j - 1];
}

std::vector<uint8_t> PlainCache::serialized_slot(uint64_t j) const {
    return serialize_slot(slot(j), cfg_.slot_bytes);
}

FindResult PlainCache::plain_lookup_oracle(std::string_view domain, uint16_t rtype,
                                           uint64_t now_ms) const {
    uint64_t j = slot_index(domain);
    return slot_find(slots_[j - 1], pir::domain_digest(domain), rtype, now_ms);
}

void PlainCache::save_snapshot(const std::string& path) const {
    wire::Writer w;
    w.header(wire::ObjectTag::cache_snapshot);
    w.u32(cfg_.n_slots);
    w.u32(cfg_.slot_bytes);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open snapshot file for writing: " + path);
    f.write(reinterpret_cast<const char*>(w.data().data()),
            static_cast<std::streamsize>(w.data().size()));
    for (const auto& s : slots_) {
        auto bytes = serialize_slot(s, cfg_.slot_bytes);
        f.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
    }
    if (!f) throw std::runtime_error("snapshot write failed: " + path);
}

PlainCache PlainCache::load_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open snapshot file: " + path);
    std::vector<uint8_t> header(6 + 8);
    f.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(header.size()));
    if (!f) throw std::runtime_error("truncated snapshot header");
    wire::Reader r(header);
    r.header(wire::ObjectTag::cache_snapshot);
    CacheConfig cfg;
    cfg.n_slots = r.u32();
    cfg.slot_bytes = r.u32();
    PlainCache cache(cfg);
    std::vector<uint8_t> buf(cfg.slot_bytes);
    for (uint32_t i = 0; i < cfg.n_slots; ++i) {
        f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!f) throw std::runtime_error("truncated snapshot slot data");
        cache.slots_[i] = parse_slot(buf);
    }
    return cache;
}

}  // namespace bdns::cache

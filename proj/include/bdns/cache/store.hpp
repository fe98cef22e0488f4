#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdns/cache/record.hpp"

namespace bdns::cache {

// All records whose domains hash to one slot, kept sorted by expiration so
// the soonest-expiring record is evicted first on overflow.
struct Slot {
    std::vector<RecordWire> records;

    size_t packed_size() const;
    bool operator==(const Slot&) const = default;
};

// Upsert on (digest, rtype); evicts earliest-expiring records until the slot
// fits capacity. Throws if the record alone cannot fit.
void slot_insert(Slot& slot, RecordWire rec, uint32_t slot_bytes);

enum class FindStatus { hit, expired, absent };

struct FindResult {
    FindStatus status = FindStatus::absent;
    // present for hit and expired (the stale record still carries the
    // final-ANS address used by the shortcut path)
    std::optional<RecordWire> record;
};

FindResult slot_find(const Slot& slot, const std::array<uint8_t, 16>& digest,
                     uint16_t rtype, uint64_t now_ms);

std::vector<uint8_t> serialize_slot(const Slot& slot, uint32_t slot_bytes);
Slot parse_slot(std::span<const uint8_t> data);

struct CacheConfig {
    uint32_t n_slots = uint32_t{1} << 15;
    uint32_t slot_bytes = 16 * 1024;

    void validate() const;
    uint64_t total_bytes() const { return static_cast<uint64_t>(n_slots) * slot_bytes; }
    bool operator==(const CacheConfig&) const = default;
};

// Plaintext side of the resolver cache. The PIR engine serves an encoded
// twin; this structure is what populate messages mutate and what tests use
// as the non-private oracle.
class PlainCache {
public:
    explicit PlainCache(CacheConfig cfg);

    const CacheConfig& config() const { return cfg_; }
    uint64_t slot_index(std::string_view domain) const;

    // returns the 1-based slot index that changed
    uint64_t insert(std::string_view domain, const RecordWire& rec);
    void insert_at(uint64_t slot_index_1based, const RecordWire& rec);

    const Slot& slot(uint64_t slot_index_1based) const;
    std::vector<uint8_t> serialized_slot(uint64_t slot_index_1based) const;

    // Test-only oracle mirroring index + slot_find on the plaintext store.
    FindResult plain_lookup_oracle(std::string_view domain, uint16_t rtype,
                                   uint64_t now_ms) const;

    void save_snapshot(const std::string& path) const;
    static PlainCache load_snapshot(const std::string& path);

private:
    CacheConfig cfg_;
    std::vector<Slot> slots_;
};

}  // namespace bdns::cache

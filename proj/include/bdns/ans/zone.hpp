#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bdns/cache/record.hpp"

namespace bdns::ans {

// One line of a zone file: "domain rtype value ttl". Values are addresses
// for A/AAAA and nameserver hostnames for NS; '#' starts a comment.
struct ZoneRecord {
    std::string domain;
    uint16_t rtype = 0;
    std::string value;
    uint32_t ttl_s = 60;
};

class ZoneData {
public:
    ZoneData() = default;
    explicit ZoneData(std::vector<std::string> origins) : origins_(std::move(origins)) {}

    static ZoneData load(const std::string& path, std::vector<std::string> origins);
    static ZoneData parse(std::string_view text, std::vector<std::string> origins);

    void add(ZoneRecord rec);
    // does this server answer authoritatively for `domain`
    bool serves(std::string_view domain) const;
    std::optional<ZoneRecord> lookup(std::string_view domain, uint16_t rtype) const;
    // any record for the name at all (NOERROR/NXDOMAIN distinction)
    bool has_name(std::string_view domain) const;
    // glue address for a nameserver named in an NS record
    std::optional<cache::IpAddr> glue(std::string_view ns_name) const;

    const std::vector<ZoneRecord>& records() const { return records_; }
    const std::vector<std::string>& origins() const { return origins_; }

private:
    std::vector<std::string> origins_;
    std::vector<ZoneRecord> records_;
};

}  // namespace bdns::ans

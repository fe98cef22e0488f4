#include "bdns/ans/zone.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bdns/dnswire/message.hpp"
#include "bdns/pir/engine.hpp"
#include "bdns/rer/protocol.hpp"

namespace bdns::ans {

namespace {

uint16_t rtype_from_token(const std::string& tok) {
    if (tok == "A") return dnswire::kTypeA;
    if (tok == "AAAA") return dnswire::kTypeAaaa;
    if (tok == "NS") return dnswire::kTypeNs;
    throw std::invalid_argument("unsupported rtype in zone file: " + tok);
}

}  // namespace

ZoneData ZoneData::parse(std::string_view text, std::vector<std::string> origins) {
    ZoneData zone(std::move(origins));
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string domain, rtype, value;
        uint32_t ttl;
        if (!(ls >> domain >> rtype >> value >> ttl)) {
            if (!domain.empty()) throw std::invalid_argument("bad zone line: " + line);
            continue;
        }
        zone.add({pir::normalize_domain(domain), rtype_from_token(rtype), value, ttl});
    }
    return zone;
}

ZoneData ZoneData::load(const std::string& path, std::vector<std::string> origins) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open zone file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), std::move(origins));
}

void ZoneData::add(ZoneRecord rec) {
    rec.domain = pir::normalize_domain(rec.domain);
    records_.push_back(std::move(rec));
}

bool ZoneData::serves(std::string_view domain) const {
    auto norm = pir::normalize_domain(domain);
    for (const auto& origin : origins_) {
        if (origin == "." || origin.empty()) return true;
        if (rer::zone_contains(origin, norm)) return true;
    }
    return false;
}

std::optional<ZoneRecord> ZoneData::lookup(std::string_view domain, uint16_t rtype) const {
    auto norm = pir::normalize_domain(domain);
    for (const auto& r : records_)
        if (r.domain == norm && r.rtype == rtype) return r;
    return std::nullopt;
}

bool ZoneData::has_name(std::string_view domain) const {
    auto norm = pir::normalize_domain(domain);
    for (const auto& r : records_)
        if (r.domain == norm) return true;
    return false;
}

std::optional<cache::IpAddr> ZoneData::glue(std::string_view ns_name) const {
    auto norm = pir::normalize_domain(ns_name);
    for (const auto& r : records_)
        if (r.domain == norm && (r.rtype == dnswire::kTypeA || r.rtype == dnswire::kTypeAaaa))
            return cache::IpAddr::parse(r.value);
    return std::nullopt;
}

}  // namespace bdns::ans

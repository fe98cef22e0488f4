#include "bdns/delay.hpp"

#include <cmath>
#include <stdexcept>

namespace bdns {

DelayDistribution DelayDistribution::fixed(uint64_t ms) {
    DelayDistribution d;
    d.kind = Kind::fixed;
    d.fixed_ms = ms;
    return d;
}

DelayDistribution DelayDistribution::uniform(uint64_t lo_ms, uint64_t hi_ms) {
    if (hi_ms < lo_ms) throw std::invalid_argument("uniform delay needs lo <= hi");
    DelayDistribution d;
    d.kind = Kind::uniform;
    d.lo_ms = lo_ms;
    d.hi_ms = hi_ms;
    return d;
}

DelayDistribution DelayDistribution::geometric(double p) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("geometric p must be in (0, 1]");
    DelayDistribution d;
    d.kind = Kind::geometric;
    d.geom_p = p;
    return d;
}

uint64_t DelayDistribution::sample(crypto::SecureRng& rng) const {
    switch (kind) {
        case Kind::fixed:
            return fixed_ms;
        case Kind::uniform:
            return lo_ms + rng.uniform(hi_ms - lo_ms + 1);
        case Kind::geometric: {
            if (geom_p >= 1.0) return 1;
            double u = rng.uniform_unit();
            // avoid log(0); u == 0 maps to the far tail
            if (u <= 0.0) u = 0x1.0p-53;
            double k = std::floor(std::log(u) / std::log1p(-geom_p));
            return 1 + static_cast<uint64_t>(k);
        }
    }
    return 0;
}

double DelayDistribution::mean() const {
    switch (kind) {
        case Kind::fixed:
            return static_cast<double>(fixed_ms);
        case Kind::uniform:
            return (static_cast<double>(lo_ms) + static_cast<double>(hi_ms)) / 2.0;
        case Kind::geometric:
            return 1.0 / geom_p;
    }
    return 0;
}

double DelayDistribution::pmf(uint64_t k) const {
    switch (kind) {
        case Kind::fixed:
            return k == fixed_ms ? 1.0 : 0.0;
        case Kind::uniform:
            return (k >= lo_ms && k <= hi_ms)
                       ? 1.0 / (static_cast<double>(hi_ms - lo_ms) + 1.0)
                       : 0.0;
        case Kind::geometric:
            if (k == 0) return 0.0;
            return std::pow(1.0 - geom_p, static_cast<double>(k - 1)) * geom_p;
    }
    return 0;
}

double DelayDistribution::tail_mass(uint64_t k) const {
    switch (kind) {
        case Kind::fixed:
            return k <= fixed_ms ? 1.0 : 0.0;
        case Kind::uniform: {
            if (k > hi_ms) return 0.0;
            uint64_t lo = std::max(k, lo_ms);
            return static_cast<double>(hi_ms - lo + 1) / (static_cast<double>(hi_ms - lo_ms) + 1.0);
        }
        case Kind::geometric:
            if (k <= 1) return 1.0;
            return std::pow(1.0 - geom_p, static_cast<double>(k - 1));
    }
    return 0;
}

DelayDistribution DelayDistribution::parse(std::string_view text) {
    auto next = [&](std::string_view& s) {
        size_t c = s.find(':');
        std::string_view tok = s.substr(0, c);
        s = c == std::string_view::npos ? std::string_view{} : s.substr(c + 1);
        return tok;
    };
    std::string_view rest = text;
    std::string_view kind = next(rest);
    auto as_u64 = [](std::string_view s) { return std::stoull(std::string(s)); };
    if (kind == "fixed") return fixed(as_u64(next(rest)));
    if (kind == "uniform") {
        uint64_t lo = as_u64(next(rest));
        return uniform(lo, as_u64(next(rest)));
    }
    if (kind == "geometric" || kind == "geom")
        return geometric(std::stod(std::string(next(rest))));
    throw std::invalid_argument("unknown delay distribution: " + std::string(text));
}

std::string DelayDistribution::to_string() const {
    switch (kind) {
        case Kind::fixed:
            return "fixed:" + std::to_string(fixed_ms);
        case Kind::uniform:
            return "uniform:" + std::to_string(lo_ms) + ":" + std::to_string(hi_ms);
        case Kind::geometric:
            return "geometric:" + std::to_string(geom_p);
    }
    return {};
}

}  // namespace bdns

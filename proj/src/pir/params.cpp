#include "bdns/pir/params.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bdns/crypto.hpp"
#include "bdns/wire.hpp"

namespace bdns::pir {

void LweParams::validate() const {
    if (n == 0) throw std::invalid_argument("lattice dimension must be positive");
    if (q_bits == 0 || q_bits > 32)
        throw std::invalid_argument("q_bits must be in [1, 32]");
    if (p_bits == 0 || 8 % p_bits != 0)
        throw std::invalid_argument("p_bits must divide 8");
    if (p_bits >= q_bits)
        throw std::invalid_argument("plaintext modulus must be smaller than ciphertext modulus");
    if (sigma <= 0) throw std::invalid_argument("sigma must be positive");
    if (dims != 1 && dims != 2) throw std::invalid_argument("dims must be 1 or 2");
    if (dims == 1 && n2 != 1)
        throw std::invalid_argument("dims == 1 requires n2 == 1");
    if (n1 == 0 || n2 == 0) throw std::invalid_argument("hypercube sides must be positive");
    if (slot_bytes == 0) throw std::invalid_argument("slot_bytes must be positive");
}

std::array<uint8_t, 32> LweParams::digest() const {
    wire::Writer w;
    w.u32(n);
    w.u32(q_bits);
    w.u32(p_bits);
    w.f64(sigma);
    w.u32(dims);
    w.u32(n1);
    w.u32(n2);
    w.u32(slot_bytes);
    return crypto::sha256(w.data());
}

std::string LweParams::to_json() const {
    nlohmann::json j{{"n", n},     {"q_bits", q_bits}, {"p_bits", p_bits},
                     {"sigma", sigma}, {"dims", dims},     {"n1", n1},
                     {"n2", n2},   {"slot_bytes", slot_bytes}};
    return j.dump();
}

LweParams LweParams::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    LweParams p;
    p.n = j.at("n").get<uint32_t>();
    p.q_bits = j.at("q_bits").get<uint32_t>();
    p.p_bits = j.at("p_bits").get<uint32_t>();
    p.sigma = j.at("sigma").get<double>();
    p.dims = j.at("dims").get<uint32_t>();
    p.n1 = j.at("n1").get<uint32_t>();
    p.n2 = j.at("n2").get<uint32_t>();
    p.slot_bytes = j.at("slot_bytes").get<uint32_t>();
    return p;
}

double noise_margin(const LweParams& params, uint64_t fan_in) {
    if (fan_in == 0) throw std::invalid_argument("fan_in must be >= 1");
    double budget_bits = static_cast<double>(params.q_bits) - params.p_bits - 1;
    // E[c^2] of a uniform base-p digit
    double p = static_cast<double>(params.p());
    double mean_sq_digit = (p - 1) * (2 * p - 1) / 6.0;
    // 8-sigma tail on the accumulated error of fan_in digit-scaled terms
    double est = 8.0 * params.sigma * std::sqrt(static_cast<double>(fan_in) * mean_sq_digit);
    double growth_bits = std::log2(std::max(est, 1.0));
    return budget_bits - growth_bits;
}

LweParams default_params(uint64_t n_slots, uint32_t slot_bytes, uint32_t dims) {
    LweParams p;
    p.slot_bytes = slot_bytes;
    p.dims = dims;
    if (dims == 1) {
        p.n = 1024;
        p.n1 = static_cast<uint32_t>(n_slots);
        p.n2 = 1;
    } else {
        // Square-ish factorization; response expansion makes big n untenable,
        // so the recursion runs on a reduced lattice dimension.
        p.n = 64;
        uint32_t side = 1;
        while (static_cast<uint64_t>(side) * side < n_slots) side <<= 1;
        if (static_cast<uint64_t>(side) * side == n_slots) {
            p.n1 = side;
            p.n2 = side;
        } else {
            p.n1 = side;
            p.n2 = static_cast<uint32_t>(n_slots / side);
        }
        if (p.slot_count() != n_slots)
            throw std::invalid_argument("n_slots must factor into a 2-d grid");
    }
    p.validate();
    return p;
}

}  // namespace bdns::pir

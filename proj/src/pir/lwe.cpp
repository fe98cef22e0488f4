#include "bdns/pir/lwe.hpp"

#include <bit>
#include <cmath>

namespace bdns::pir {

int32_t sample_error(double sigma, crypto::SecureRng& rng) {
    // sum of `pairs` (bit - bit) terms has variance pairs/2
    auto pairs = static_cast<uint32_t>(std::lround(2.0 * sigma * sigma));
    int32_t e = 0;
    while (pairs >= 64) {
        e += std::popcount(rng.next_u64()) - std::popcount(rng.next_u64());
        pairs -= 64;
    }
    if (pairs > 0) {
        uint64_t mask = (uint64_t{1} << pairs) - 1;
        e += std::popcount(rng.next_u64() & mask) - std::popcount(rng.next_u64() & mask);
    }
    return e;
}

Ciphertext enc(const QueryKey& key, uint32_t digit, crypto::SecureRng& rng) {
    const auto& pr = key.params;
    const uint32_t mask = pr.q_mask();
    Ciphertext ct;
    ct.a.resize(pr.n);
    rng.fill({reinterpret_cast<uint8_t*>(ct.a.data()), ct.a.size() * 4});
    uint32_t acc = 0;
    for (uint32_t i = 0; i < pr.n; ++i) {
        ct.a[i] &= mask;
        acc += ct.a[i] * key.secret[i];
    }
    int32_t e = sample_error(pr.sigma, rng);
    ct.b = (acc + static_cast<uint32_t>(e) + digit * pr.delta()) & mask;
    return ct;
}

DecResult dec_checked(const QueryKey& key, const Ciphertext& ct) {
    const auto& pr = key.params;
    const uint32_t mask = pr.q_mask();
    uint32_t acc = 0;
    for (uint32_t i = 0; i < pr.n; ++i) acc += ct.a[i] * key.secret[i];
    uint32_t phase = (ct.b - acc) & mask;

    const uint64_t delta = pr.delta();
    uint64_t rounded = (phase + delta / 2) & mask;  // mod q before dividing
    uint32_t digit = static_cast<uint32_t>((rounded / delta) % pr.p());

    // centered residual relative to the recovered digit embedding
    uint64_t q = pr.q();
    int64_t noise = static_cast<int64_t>((phase - digit * delta) & mask);
    if (noise >= static_cast<int64_t>(q / 2)) noise -= static_cast<int64_t>(q);

    DecResult out;
    out.digit = digit;
    out.noise = noise;
    out.noise_ok = std::llabs(noise) <= static_cast<int64_t>(delta / 4);
    return out;
}

uint32_t dec(const QueryKey& key, const Ciphertext& ct) {
    DecResult r = dec_checked(key, ct);
    if (!r.noise_ok)
        throw NoiseOverflowError("decryption noise outside rounding tolerance");
    return r.digit;
}

Ciphertext eval_add(const LweParams& params, const Ciphertext& x, const Ciphertext& y) {
    const uint32_t mask = params.q_mask();
    Ciphertext out;
    out.a.resize(params.n);
    for (uint32_t i = 0; i < params.n; ++i) out.a[i] = (x.a[i] + y.a[i]) & mask;
    out.b = (x.b + y.b) & mask;
    return out;
}

Ciphertext eval_pt_mul(const LweParams& params, uint32_t scalar, const Ciphertext& x) {
    const uint32_t mask = params.q_mask();
    Ciphertext out;
    out.a.resize(params.n);
    for (uint32_t i = 0; i < params.n; ++i) out.a[i] = (scalar * x.a[i]) & mask;
    out.b = (scalar * x.b) & mask;
    return out;
}

void bytes_to_digits(const LweParams& params, std::span<const uint8_t> bytes,
                     std::span<uint8_t> digits) {
    const uint32_t per_byte = params.digits_per_byte();
    const uint32_t bits = params.p_bits;
    const uint8_t digit_mask = static_cast<uint8_t>(params.p() - 1);
    if (digits.size() != bytes.size() * per_byte)
        throw std::invalid_argument("digit buffer size mismatch");
    size_t d = 0;
    for (uint8_t byte : bytes)
        for (uint32_t k = 0; k < per_byte; ++k)
            digits[d++] = static_cast<uint8_t>(byte >> (k * bits)) & digit_mask;
}

void digits_to_bytes(const LweParams& params, std::span<const uint8_t> digits,
                     std::span<uint8_t> bytes) {
    const uint32_t per_byte = params.digits_per_byte();
    const uint32_t bits = params.p_bits;
    if (digits.size() != bytes.size() * per_byte)
        throw std::invalid_argument("digit buffer size mismatch");
    size_t d = 0;
    for (auto& byte : bytes) {
        uint32_t v = 0;
        for (uint32_t k = 0; k < per_byte; ++k)
            v |= static_cast<uint32_t>(digits[d++]) << (k * bits);
        byte = static_cast<uint8_t>(v);
    }
}

}  // namespace bdns::pir

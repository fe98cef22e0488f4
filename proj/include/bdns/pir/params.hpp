#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace bdns::pir {

// Parameters of the reference LWE scheme. Both moduli are powers of two so
// all ciphertext arithmetic is plain 32-bit words: q = 2^q_bits (q_bits == 32
// uses native wraparound), p = 2^p_bits. Plaintext symbols are base-p digits
// of the slot bytes, so p_bits must divide 8.
struct LweParams {
    uint32_t n = 1024;       // lattice dimension
    uint32_t q_bits = 32;    // ciphertext modulus bit width, <= 32
    uint32_t p_bits = 8;     // plaintext modulus bit width
    double sigma = 6.4;      // error stddev, realized by a centered binomial sampler
    uint32_t dims = 1;       // 1 = flat one-hot, 2 = hypercube recursion
    uint32_t n1 = 0;         // first hypercube side (== N when dims == 1)
    uint32_t n2 = 1;         // second hypercube side (1 when dims == 1)
    uint32_t slot_bytes = 256;

    uint64_t slot_count() const { return static_cast<uint64_t>(n1) * n2; }
    uint64_t q() const { return uint64_t{1} << q_bits; }
    uint32_t p() const { return uint32_t{1} << p_bits; }
    uint32_t q_mask() const {
        return q_bits == 32 ? 0xffffffffu : (uint32_t{1} << q_bits) - 1;
    }
    // scaling factor between plaintext digits and ciphertext values
    uint32_t delta() const { return uint32_t{1} << (q_bits - p_bits); }
    uint32_t digits_per_byte() const { return 8 / p_bits; }
    uint32_t digits_per_slot() const { return slot_bytes * digits_per_byte(); }
    // base-p digits needed to carry one q-word (exact for p_bits in {1,2,4,8})
    uint32_t digits_per_word() const { return (q_bits + p_bits - 1) / p_bits; }
    uint32_t words_per_ciphertext() const { return n + 1; }

    // Ciphertext-word expansion per recursion level: each inner q-word becomes
    // digits_per_word() fresh ciphertexts of words_per_ciphertext() words.
    uint64_t recursion_expansion() const {
        return static_cast<uint64_t>(words_per_ciphertext()) * digits_per_word();
    }

    // throws std::invalid_argument on violated invariants
    void validate() const;

    bool operator==(const LweParams&) const = default;

    std::array<uint8_t, 32> digest() const;
    std::string to_json() const;
    static LweParams from_json(const std::string& text);
};

// Conservative high-probability bound on decryption-noise headroom, in bits:
// log2(q / 2p) minus the estimated noise of an inner product of fan_in
// digit-scaled fresh ciphertexts. Negative means the configuration must not
// be served.
double noise_margin(const LweParams& params, uint64_t fan_in);

// Default parameter sets. dims == 2 uses a reduced lattice dimension because
// the recursion multiplies response size by recursion_expansion().
LweParams default_params(uint64_t n_slots, uint32_t slot_bytes, uint32_t dims = 1);

}  // namespace bdns::pir

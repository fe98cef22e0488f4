#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "bdns/crypto.hpp"
#include "bdns/pir/params.hpp"

namespace bdns::pir {

// Regev ciphertext: b = <a, s> + e + m * delta  (everything mod q).
struct Ciphertext {
    std::vector<uint32_t> a;
    uint32_t b = 0;
};

struct QueryKey {
    std::vector<uint32_t> secret;
    LweParams params;
};

class NoiseOverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Centered binomial error with variance sigma^2 (pair count = 2*sigma^2).
int32_t sample_error(double sigma, crypto::SecureRng& rng);

Ciphertext enc(const QueryKey& key, uint32_t digit, crypto::SecureRng& rng);

struct DecResult {
    uint32_t digit = 0;
    // distance from the nearest digit embedding, centered; |noise| beyond
    // delta/4 is reported as overflow
    int64_t noise = 0;
    bool noise_ok = true;
};

DecResult dec_checked(const QueryKey& key, const Ciphertext& ct);
// throws NoiseOverflowError when the residual leaves the rounding tolerance
uint32_t dec(const QueryKey& key, const Ciphertext& ct);

Ciphertext eval_add(const LweParams& params, const Ciphertext& x, const Ciphertext& y);
Ciphertext eval_pt_mul(const LweParams& params, uint32_t scalar, const Ciphertext& x);

// Digit codec between raw bytes and base-p digits (little-endian digit order
// within each byte).
void bytes_to_digits(const LweParams& params, std::span<const uint8_t> bytes,
                     std::span<uint8_t> digits);
void digits_to_bytes(const LweParams& params, std::span<const uint8_t> digits,
                     std::span<uint8_t> bytes);

}  // namespace bdns::pir

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bdns::crypto {

using Sha256Digest = std::array<uint8_t, 32>;

Sha256Digest sha256(std::span<const uint8_t> data);
Sha256Digest sha256(std::string_view data);

// Buffered CSPRNG. The default stream draws from the OS entropy pool; the
// seeded stream is a deterministic ChaCha20 expansion used by tests and the
// trace synthesizer for reproducible runs.
class SecureRng {
public:
    SecureRng();
    static SecureRng seeded(uint64_t seed);

    void fill(std::span<uint8_t> out);
    uint8_t next_u8();
    uint32_t next_u32();
    uint64_t next_u64();
    // Uniform integer in [0, bound) without modulo bias.
    uint64_t uniform(uint64_t bound);
    // Uniform double in [0, 1).
    double uniform_unit();

private:
    explicit SecureRng(std::array<uint8_t, 32> seed);
    void refill();

    bool deterministic_ = false;
    std::array<uint8_t, 32> seed_{};
    uint64_t block_counter_ = 0;
    std::array<uint8_t, 65536> buf_{};
    size_t pos_ = buf_.size();
};

struct SigningKey {
    std::array<uint8_t, 64> secret{};
    std::array<uint8_t, 32> verify{};
};

using Signature = std::array<uint8_t, 64>;

SigningKey ed25519_keypair();
SigningKey ed25519_keypair_from_seed(std::span<const uint8_t> seed32);
Signature ed25519_sign(const SigningKey& key, std::span<const uint8_t> msg);
bool ed25519_verify(const std::array<uint8_t, 32>& verify_key,
                    std::span<const uint8_t> msg, const Signature& sig);

std::string hex_encode(std::span<const uint8_t> data);
std::vector<uint8_t> hex_decode(std::string_view hex);

}  // namespace bdns::crypto

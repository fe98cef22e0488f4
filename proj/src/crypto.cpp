#include "bdns/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace bdns::crypto {

namespace {

void ensure_sodium() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
    });
}

}  // namespace

Sha256Digest sha256(std::span<const uint8_t> data) {
    ensure_sodium();
    Sha256Digest out;
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

Sha256Digest sha256(std::string_view data) {
    return sha256(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

SecureRng::SecureRng() { ensure_sodium(); }

SecureRng::SecureRng(std::array<uint8_t, 32> seed) : deterministic_(true), seed_(seed) {
    ensure_sodium();
}

SecureRng SecureRng::seeded(uint64_t seed) {
    std::array<uint8_t, 32> s{};
    for (int i = 0; i < 8; ++i) s[i] = static_cast<uint8_t>(seed >> (8 * i));
    return SecureRng(s);
}

void SecureRng::refill() {
    if (deterministic_) {
        std::array<uint8_t, 32> block_seed = seed_;
        for (int i = 0; i < 8; ++i)
            block_seed[24 + i] ^= static_cast<uint8_t>(block_counter_ >> (8 * i));
        randombytes_buf_deterministic(buf_.data(), buf_.size(), block_seed.data());
        ++block_counter_;
    } else {
        randombytes_buf(buf_.data(), buf_.size());
    }
    pos_ = 0;
}

void SecureRng::fill(std::span<uint8_t> out) {
    size_t done = 0;
    while (done < out.size()) {
        if (pos_ == buf_.size()) refill();
        size_t take = std::min(out.size() - done, buf_.size() - pos_);
        std::memcpy(out.data() + done, buf_.data() + pos_, take);
        pos_ += take;
        done += take;
    }
}

uint8_t SecureRng::next_u8() {
    uint8_t v;
    fill({&v, 1});
    return v;
}

uint32_t SecureRng::next_u32() {
    uint8_t v[4];
    fill(v);
    uint32_t out;
    std::memcpy(&out, v, 4);
    return out;
}

uint64_t SecureRng::next_u64() {
    uint8_t v[8];
    fill(v);
    uint64_t out;
    std::memcpy(&out, v, 8);
    return out;
}

uint64_t SecureRng::uniform(uint64_t bound) {
    if (bound < 2) return 0;
    // rejection sampling on the top of the range
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % bound;
}

double SecureRng::uniform_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

SigningKey ed25519_keypair() {
    ensure_sodium();
    SigningKey key;
    crypto_sign_ed25519_keypair(key.verify.data(), key.secret.data());
    return key;
}

SigningKey ed25519_keypair_from_seed(std::span<const uint8_t> seed32) {
    ensure_sodium();
    if (seed32.size() != crypto_sign_ed25519_SEEDBYTES)
        throw std::invalid_argument("ed25519 seed must be 32 bytes");
    SigningKey key;
    crypto_sign_ed25519_seed_keypair(key.verify.data(), key.secret.data(), seed32.data());
    return key;
}

Signature ed25519_sign(const SigningKey& key, std::span<const uint8_t> msg) {
    Signature sig;
    crypto_sign_ed25519_detached(sig.data(), nullptr, msg.data(), msg.size(),
                                 key.secret.data());
    return sig;
}

bool ed25519_verify(const std::array<uint8_t, 32>& verify_key,
                    std::span<const uint8_t> msg, const Signature& sig) {
    ensure_sodium();
    return crypto_sign_ed25519_verify_detached(sig.data(), msg.data(), msg.size(),
                                               verify_key.data()) == 0;
}

std::string hex_encode(std::span<const uint8_t> data) {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

std::vector<uint8_t> hex_decode(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) throw std::invalid_argument("odd hex length");
    std::vector<uint8_t> out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]), lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("bad hex digit");
        out[i] = static_cast<uint8_t>(hi << 4 | lo);
    }
    return out;
}

}  // namespace bdns::crypto

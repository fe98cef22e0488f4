#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bdns/pir/lwe.hpp"
#include "bdns/pir/params.hpp"

namespace bdns::pir {

struct PublicKey {
    std::vector<uint8_t> blob;  // empty for dims == 1, decomposition config for dims == 2
    std::array<uint8_t, 32> params_digest{};
};

// Server-side encoding of the cache: per slot, the base-p digit expansion of
// the slot bytes. Unset slots are all-zero digits.
struct EncodedCache {
    LweParams layout;
    std::vector<uint8_t> digits;  // slot_count() * digits_per_slot(), row-major

    static EncodedCache empty(const LweParams& layout);
    std::span<const uint8_t> slot_digits(uint64_t slot_index_1based) const;
};

struct PirQuery {
    std::vector<Ciphertext> row_selector;  // length n1
    std::vector<Ciphertext> col_selector;  // length n2 when dims == 2, else empty
};

struct PirResponse {
    std::vector<Ciphertext> payload;
};

struct AnswerStats {
    uint64_t mac_ops = 0;  // ciphertext-scalar multiply-accumulates
};

// --- the six primitives ---

std::pair<QueryKey, PublicKey> setup_user(uint64_t n_slots, const LweParams& params,
                                          crypto::SecureRng& rng);

// Replaces slot j (1-based) with the digit expansion of `slot`; every other
// slot is untouched.
void setup_server(EncodedCache& cache, uint64_t j, std::span<const uint8_t> slot);

// Deterministic keyword-to-slot hash, identical on client and server:
// SHA-256 of the lowercased FQDN (trailing dot stripped), first 8 bytes as a
// big-endian integer, mod N, plus 1.
uint64_t index(std::string_view keyword, uint64_t n_slots);

// 16-byte record digest from the same hash source as index().
std::array<uint8_t, 16> domain_digest(std::string_view keyword);
std::string normalize_domain(std::string_view domain);
uint64_t index_from_digest(const std::array<uint8_t, 16>& digest, uint64_t n_slots);

PirQuery query(const QueryKey& qk, uint64_t idx, crypto::SecureRng& rng);

PirResponse answer(const PublicKey& pk, const EncodedCache& cache, const PirQuery& q,
                   AnswerStats* stats = nullptr);

std::vector<uint8_t> extract(const QueryKey& qk, const PirResponse& r);

// Decrypts the selector vectors; used by miss-proof verification to check
// which index a query addresses. Returns the 1-based index when every
// selector decrypts to a clean one-hot pattern.
std::optional<uint64_t> decrypted_query_index(const QueryKey& qk, const PirQuery& q);

// --- serialization (see docs/wire-format.md) ---

std::vector<uint8_t> serialize(const PublicKey& pk);
PublicKey deserialize_public_key(std::span<const uint8_t> data);

std::vector<uint8_t> serialize(const LweParams& params, const PirQuery& q);
PirQuery deserialize_query(const LweParams& params, std::span<const uint8_t> data);

std::vector<uint8_t> serialize(const LweParams& params, const PirResponse& r);
PirResponse deserialize_response(const LweParams& params, std::span<const uint8_t> data);

std::vector<uint8_t> serialize(const QueryKey& qk);
QueryKey deserialize_query_key(std::span<const uint8_t> data);

// Byte sizes implied by the params alone; serialized transcripts always match
// these exactly, independent of the addressed index.
size_t serialized_query_size(const LweParams& params);
size_t serialized_response_size(const LweParams& params);

}  // namespace bdns::pir

#include "bdns/pir/engine.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "bdns/wire.hpp"

namespace bdns::pir {

namespace {

// digit block kept small enough that the accumulator tile stays cache-resident
constexpr uint32_t kDigitBlock = 32;

void check_params_match(const PublicKey& pk, const EncodedCache& cache) {
    if (pk.params_digest != cache.layout.digest())
        throw std::invalid_argument("public key parameter digest does not match cache layout");
}

std::vector<uint32_t> flatten(const LweParams& pr, const std::vector<Ciphertext>& cts) {
    const uint32_t wpc = pr.words_per_ciphertext();
    std::vector<uint32_t> flat(cts.size() * wpc);
    for (size_t i = 0; i < cts.size(); ++i) {
        if (cts[i].a.size() != pr.n) throw std::invalid_argument("malformed ciphertext length");
        std::memcpy(&flat[i * wpc], cts[i].a.data(), pr.n * 4);
        flat[i * wpc + pr.n] = cts[i].b;
    }
    return flat;
}

std::vector<Ciphertext> unflatten(const LweParams& pr, std::span<const uint32_t> words) {
    const uint32_t wpc = pr.words_per_ciphertext();
    if (words.size() % wpc != 0) throw std::invalid_argument("ciphertext word count mismatch");
    std::vector<Ciphertext> cts(words.size() / wpc);
    for (size_t i = 0; i < cts.size(); ++i) {
        cts[i].a.assign(words.begin() + i * wpc, words.begin() + i * wpc + pr.n);
        cts[i].b = words[i * wpc + pr.n];
    }
    return cts;
}

// out[k] += digit(j, k) * ct_j for a block of digit columns. The loop touches
// every (slot, digit) pair exactly once; there is deliberately no shortcut for
// zero digits, so the memory-access pattern carries no information about the
// hot index.
void mac_block(std::span<uint32_t> acc, std::span<const uint32_t> selector_words,
               std::span<const uint8_t> digits, uint32_t n_rows, uint32_t n_cols,
               uint32_t wpc, AnswerStats* stats) {
    uint64_t macs = 0;
    for (uint32_t k0 = 0; k0 < n_cols; k0 += kDigitBlock) {
        const uint32_t kend = std::min(k0 + kDigitBlock, n_cols);
        for (uint32_t j = 0; j < n_rows; ++j) {
            const uint32_t* ct = &selector_words[static_cast<size_t>(j) * wpc];
            const uint8_t* dg = &digits[static_cast<size_t>(j) * n_cols];
            for (uint32_t k = k0; k < kend; ++k) {
                const uint32_t c = dg[k];
                uint32_t* out = &acc[static_cast<size_t>(k) * wpc];
                for (uint32_t w = 0; w < wpc; ++w) out[w] += c * ct[w];
                ++macs;
            }
        }
    }
    if (stats) stats->mac_ops += macs;
}

void mask_words(std::span<uint32_t> words, uint32_t mask) {
    if (mask == 0xffffffffu) return;
    for (auto& w : words) w &= mask;
}

void word_to_digits(const LweParams& pr, uint32_t word, std::span<uint8_t> out) {
    const uint32_t dpw = pr.digits_per_word();
    const uint32_t digit_mask = pr.p() - 1;
    for (uint32_t k = 0; k < dpw; ++k)
        out[k] = static_cast<uint8_t>(word >> (k * pr.p_bits)) & digit_mask;
}

uint32_t digits_to_word(const LweParams& pr, std::span<const uint8_t> digits) {
    uint32_t w = 0;
    for (uint32_t k = 0; k < pr.digits_per_word(); ++k)
        w |= static_cast<uint32_t>(digits[k]) << (k * pr.p_bits);
    return w & pr.q_mask();
}

}  // namespace

EncodedCache EncodedCache::empty(const LweParams& layout) {
    layout.validate();
    EncodedCache c;
    c.layout = layout;
    c.digits.assign(layout.slot_count() * layout.digits_per_slot(), 0);
    return c;
}

std::span<const uint8_t> EncodedCache::slot_digits(uint64_t slot_index_1based) const {
    const uint64_t d = layout.digits_per_slot();
    if (slot_index_1based < 1 || slot_index_1based > layout.slot_count())
        throw std::out_of_range("slot index out of range");
    return {digits.data() + (slot_index_1based - 1) * d, d};
}

std::pair<QueryKey, PublicKey> setup_user(uint64_t n_slots, const LweParams& params,
                                          crypto::SecureRng& rng) {
    params.validate();
    if (params.slot_count() != n_slots)
        throw std::invalid_argument("n_slots does not match n1*n2");

    QueryKey qk;
    qk.params = params;
    qk.secret.resize(params.n);
    rng.fill({reinterpret_cast<uint8_t*>(qk.secret.data()), qk.secret.size() * 4});
    mask_words(qk.secret, params.q_mask());

    PublicKey pk;
    pk.params_digest = params.digest();
    if (params.dims == 2) {
        wire::Writer w;
        w.u32(params.words_per_ciphertext());
        w.u32(params.digits_per_word());
        pk.blob = w.take();
    }
    return {std::move(qk), std::move(pk)};
}

void setup_server(EncodedCache& cache, uint64_t j, std::span<const uint8_t> slot) {
    const auto& pr = cache.layout;
    if (j < 1 || j > pr.slot_count()) throw std::out_of_range("slot index out of range");
    if (slot.size() != pr.slot_bytes)
        throw std::invalid_argument("slot payload must be exactly slot_bytes");
    const uint64_t d = pr.digits_per_slot();
    bytes_to_digits(pr, slot, {cache.digits.data() + (j - 1) * d, d});
}

std::string normalize_domain(std::string_view domain) {
    std::string out(domain);
    if (!out.empty() && out.back() == '.') out.pop_back();
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::array<uint8_t, 16> domain_digest(std::string_view keyword) {
    auto h = crypto::sha256(normalize_domain(keyword));
    std::array<uint8_t, 16> d;
    std::copy_n(h.begin(), 16, d.begin());
    return d;
}

uint64_t index_from_digest(const std::array<uint8_t, 16>& digest, uint64_t n_slots) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | digest[i];
    return v % n_slots + 1;
}

uint64_t index(std::string_view keyword, uint64_t n_slots) {
    if (keyword.empty()) throw std::invalid_argument("empty keyword");
    return index_from_digest(domain_digest(keyword), n_slots);
}

PirQuery query(const QueryKey& qk, uint64_t idx, crypto::SecureRng& rng) {
    const auto& pr = qk.params;
    if (idx < 1 || idx > pr.slot_count()) throw std::out_of_range("index out of range");
    const uint64_t z = idx - 1;
    const uint32_t row_hot = static_cast<uint32_t>(z % pr.n1);
    const uint32_t col_hot = static_cast<uint32_t>(z / pr.n1);

    PirQuery q;
    q.row_selector.reserve(pr.n1);
    for (uint32_t i = 0; i < pr.n1; ++i)
        q.row_selector.push_back(enc(qk, i == row_hot ? 1 : 0, rng));
    if (pr.dims == 2) {
        q.col_selector.reserve(pr.n2);
        for (uint32_t i = 0; i < pr.n2; ++i)
            q.col_selector.push_back(enc(qk, i == col_hot ? 1 : 0, rng));
    }
    return q;
}

PirResponse answer(const PublicKey& pk, const EncodedCache& cache, const PirQuery& q,
                   AnswerStats* stats) {
    check_params_match(pk, cache);
    const auto& pr = cache.layout;
    const uint32_t wpc = pr.words_per_ciphertext();
    const uint32_t d_slot = pr.digits_per_slot();

    if (q.row_selector.size() != pr.n1)
        throw std::invalid_argument("row selector length mismatch");
    if (pr.dims == 2 && q.col_selector.size() != pr.n2)
        throw std::invalid_argument("column selector length mismatch");
    if (pr.dims == 1 && !q.col_selector.empty())
        throw std::invalid_argument("unexpected column selector");

    auto row_words = flatten(pr, q.row_selector);

    if (pr.dims == 1) {
        std::vector<uint32_t> acc(static_cast<size_t>(d_slot) * wpc, 0);
        mac_block(acc, row_words, cache.digits, pr.n1, d_slot, wpc, stats);
        mask_words(acc, pr.q_mask());
        PirResponse r;
        r.payload = unflatten(pr, acc);
        return r;
    }

    // dims == 2: fold rows, then run the selected-row ciphertexts through the
    // second dimension as plaintext digits.
    const uint32_t n1 = pr.n1, n2 = pr.n2;

    // stage 1: per grid column, inner product over the n1 rows
    std::vector<uint32_t> folded(static_cast<size_t>(n2) * d_slot * wpc, 0);
    for (uint32_t c = 0; c < n2; ++c) {
        std::span<const uint8_t> col_digits{
            cache.digits.data() + static_cast<size_t>(c) * n1 * d_slot,
            static_cast<size_t>(n1) * d_slot};
        mac_block({folded.data() + static_cast<size_t>(c) * d_slot * wpc,
                   static_cast<size_t>(d_slot) * wpc},
                  row_words, col_digits, n1, d_slot, wpc, stats);
    }
    mask_words(folded, pr.q_mask());

    // stage 2: decompose each folded column into base-p digits and select the
    // target column with the second one-hot vector
    const uint32_t dpw = pr.digits_per_word();
    const size_t words_per_cell = static_cast<size_t>(d_slot) * wpc;
    const size_t digits_per_cell = words_per_cell * dpw;

    std::vector<uint8_t> stage2_digits(static_cast<size_t>(n2) * digits_per_cell);
    for (uint32_t c = 0; c < n2; ++c)
        for (size_t w = 0; w < words_per_cell; ++w)
            word_to_digits(pr, folded[static_cast<size_t>(c) * words_per_cell + w],
                           {&stage2_digits[static_cast<size_t>(c) * digits_per_cell + w * dpw],
                            dpw});

    auto col_words = flatten(pr, q.col_selector);
    std::vector<uint32_t> acc(digits_per_cell * wpc, 0);
    mac_block(acc, col_words, stage2_digits, n2, static_cast<uint32_t>(digits_per_cell),
              wpc, stats);
    mask_words(acc, pr.q_mask());

    PirResponse r;
    r.payload = unflatten(pr, acc);
    return r;
}

std::vector<uint8_t> extract(const QueryKey& qk, const PirResponse& r) {
    const auto& pr = qk.params;
    const uint32_t d_slot = pr.digits_per_slot();
    const uint32_t wpc = pr.words_per_ciphertext();

    if (pr.dims == 1) {
        if (r.payload.size() != d_slot)
            throw std::invalid_argument("response payload length mismatch");
        std::vector<uint8_t> digits(d_slot);
        for (uint32_t k = 0; k < d_slot; ++k) digits[k] = static_cast<uint8_t>(dec(qk, r.payload[k]));
        std::vector<uint8_t> bytes(pr.slot_bytes);
        digits_to_bytes(pr, digits, bytes);
        return bytes;
    }

    const uint32_t dpw = pr.digits_per_word();
    const size_t words_per_cell = static_cast<size_t>(d_slot) * wpc;
    const size_t expected = words_per_cell * dpw;
    if (r.payload.size() != expected)
        throw std::invalid_argument("response payload length mismatch");

    // outer layer: recover the folded ciphertext words digit by digit
    std::vector<uint8_t> outer_digits(expected);
    for (size_t t = 0; t < expected; ++t)
        outer_digits[t] = static_cast<uint8_t>(dec(qk, r.payload[t]));

    std::vector<uint32_t> inner_words(words_per_cell);
    for (size_t w = 0; w < words_per_cell; ++w)
        inner_words[w] = digits_to_word(pr, {&outer_digits[w * dpw], dpw});

    // inner layer: the folded ciphertexts of the selected slot
    auto inner = unflatten(pr, inner_words);
    std::vector<uint8_t> digits(d_slot);
    for (uint32_t k = 0; k < d_slot; ++k) digits[k] = static_cast<uint8_t>(dec(qk, inner[k]));
    std::vector<uint8_t> bytes(pr.slot_bytes);
    digits_to_bytes(pr, digits, bytes);
    return bytes;
}

std::optional<uint64_t> decrypted_query_index(const QueryKey& qk, const PirQuery& q) {
    const auto& pr = qk.params;
    auto one_hot = [&](const std::vector<Ciphertext>& sel,
                       uint32_t expected_len) -> std::optional<uint32_t> {
        if (sel.size() != expected_len) return std::nullopt;
        std::optional<uint32_t> hot;
        for (uint32_t i = 0; i < sel.size(); ++i) {
            DecResult d = dec_checked(qk, sel[i]);
            if (!d.noise_ok) return std::nullopt;
            if (d.digit == 0) continue;
            if (d.digit != 1 || hot) return std::nullopt;
            hot = i;
        }
        return hot;
    };

    auto row = one_hot(q.row_selector, pr.n1);
    if (!row) return std::nullopt;
    uint32_t col = 0;
    if (pr.dims == 2) {
        auto c = one_hot(q.col_selector, pr.n2);
        if (!c) return std::nullopt;
        col = *c;
    } else if (!q.col_selector.empty()) {
        return std::nullopt;
    }
    return static_cast<uint64_t>(col) * pr.n1 + *row + 1;
}

// --- serialization ---

namespace {

void write_cts(wire::Writer& w, const LweParams& pr, const std::vector<Ciphertext>& cts) {
    for (const auto& ct : cts) {
        for (uint32_t i = 0; i < pr.n; ++i) w.u32(ct.a[i]);
        w.u32(ct.b);
    }
}

std::vector<Ciphertext> read_cts(wire::Reader& r, const LweParams& pr, size_t count) {
    std::vector<Ciphertext> cts(count);
    for (auto& ct : cts) {
        ct.a.resize(pr.n);
        for (uint32_t i = 0; i < pr.n; ++i) ct.a[i] = r.u32();
        ct.b = r.u32();
    }
    return cts;
}

void write_params(wire::Writer& w, const LweParams& p) {
    w.u32(p.n);
    w.u32(p.q_bits);
    w.u32(p.p_bits);
    w.f64(p.sigma);
    w.u32(p.dims);
    w.u32(p.n1);
    w.u32(p.n2);
    w.u32(p.slot_bytes);
}

LweParams read_params(wire::Reader& r) {
    LweParams p;
    p.n = r.u32();
    p.q_bits = r.u32();
    p.p_bits = r.u32();
    p.sigma = r.f64();
    p.dims = r.u32();
    p.n1 = r.u32();
    p.n2 = r.u32();
    p.slot_bytes = r.u32();
    p.validate();
    return p;
}

size_t response_ct_count(const LweParams& pr) {
    size_t d = pr.digits_per_slot();
    return pr.dims == 1 ? d : d * pr.words_per_ciphertext() * pr.digits_per_word();
}

}  // namespace

std::vector<uint8_t> serialize(const PublicKey& pk) {
    wire::Writer w;
    w.header(wire::ObjectTag::public_key);
    w.bytes(pk.params_digest);
    w.blob(pk.blob);
    return w.take();
}

PublicKey deserialize_public_key(std::span<const uint8_t> data) {
    wire::Reader r(data);
    r.header(wire::ObjectTag::public_key);
    PublicKey pk;
    auto d = r.bytes(32);
    std::copy(d.begin(), d.end(), pk.params_digest.begin());
    auto blob = r.blob();
    pk.blob.assign(blob.begin(), blob.end());
    return pk;
}

std::vector<uint8_t> serialize(const LweParams& params, const PirQuery& q) {
    wire::Writer w;
    w.header(wire::ObjectTag::pir_query);
    w.u32(static_cast<uint32_t>(q.row_selector.size()));
    w.u32(static_cast<uint32_t>(q.col_selector.size()));
    write_cts(w, params, q.row_selector);
    write_cts(w, params, q.col_selector);
    return w.take();
}

PirQuery deserialize_query(const LweParams& params, std::span<const uint8_t> data) {
    wire::Reader r(data);
    r.header(wire::ObjectTag::pir_query);
    uint32_t rows = r.u32();
    uint32_t cols = r.u32();
    if (rows != params.n1 || cols != (params.dims == 2 ? params.n2 : 0))
        throw wire::WireError("selector counts do not match parameters");
    PirQuery q;
    q.row_selector = read_cts(r, params, rows);
    q.col_selector = read_cts(r, params, cols);
    if (!r.done()) throw wire::WireError("trailing bytes after query");
    return q;
}

std::vector<uint8_t> serialize(const LweParams& params, const PirResponse& resp) {
    wire::Writer w;
    w.header(wire::ObjectTag::pir_response);
    w.u32(static_cast<uint32_t>(resp.payload.size()));
    write_cts(w, params, resp.payload);
    return w.take();
}

PirResponse deserialize_response(const LweParams& params, std::span<const uint8_t> data) {
    wire::Reader r(data);
    r.header(wire::ObjectTag::pir_response);
    uint32_t count = r.u32();
    if (count != response_ct_count(params))
        throw wire::WireError("response ciphertext count does not match parameters");
    PirResponse resp;
    resp.payload = read_cts(r, params, count);
    if (!r.done()) throw wire::WireError("trailing bytes after response");
    return resp;
}

std::vector<uint8_t> serialize(const QueryKey& qk) {
    wire::Writer w;
    w.header(wire::ObjectTag::query_key);
    write_params(w, qk.params);
    w.u32(static_cast<uint32_t>(qk.secret.size()));
    for (uint32_t v : qk.secret) w.u32(v);
    return w.take();
}

QueryKey deserialize_query_key(std::span<const uint8_t> data) {
    wire::Reader r(data);
    r.header(wire::ObjectTag::query_key);
    QueryKey qk;
    qk.params = read_params(r);
    uint32_t len = r.u32();
    if (len != qk.params.n) throw wire::WireError("secret length mismatch");
    qk.secret.resize(len);
    for (auto& v : qk.secret) v = r.u32();
    if (!r.done()) throw wire::WireError("trailing bytes after query key");
    return qk;
}

size_t serialized_query_size(const LweParams& params) {
    size_t cts = params.n1 + (params.dims == 2 ? params.n2 : 0);
    return 6 + 8 + cts * params.words_per_ciphertext() * 4;
}

size_t serialized_response_size(const LweParams& params) {
    return 6 + 4 + response_ct_count(params) * params.words_per_ciphertext() * 4;
}

}  // namespace bdns::pir

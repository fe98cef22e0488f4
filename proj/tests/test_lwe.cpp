#include <doctest.h>

#include "bdns/pir/engine.hpp"
#include "bdns/pir/lwe.hpp"

using namespace bdns;
using namespace bdns::pir;

namespace {

LweParams small_params() {
    LweParams p;
    p.n = 64;
    p.n1 = 16;
    p.n2 = 1;
    p.slot_bytes = 16;
    return p;
}

QueryKey make_key(const LweParams& p, crypto::SecureRng& rng) {
    return setup_user(p.slot_count(), p, rng).first;
}

}  // namespace

TEST_CASE("enc/dec round-trips every digit value") {
    auto rng = crypto::SecureRng::seeded(1);
    auto p = small_params();
    auto key = make_key(p, rng);
    CHECK(dec(key, enc(key, 0, rng)) == 0);
    for (uint32_t d = 0; d < p.p(); d += 13) CHECK(dec(key, enc(key, d, rng)) == d);
    CHECK(dec(key, enc(key, p.p() - 1, rng)) == p.p() - 1);
}

TEST_CASE("homomorphic add and plaintext multiply identities") {
    auto rng = crypto::SecureRng::seeded(2);
    auto p = small_params();
    auto key = make_key(p, rng);

    // (3 + 250) mod 256 with p = 2^8
    auto sum = eval_add(p, enc(key, 3, rng), enc(key, 250, rng));
    CHECK(dec(key, sum) == (3 + 250) % 256);

    for (int trial = 0; trial < 50; ++trial) {
        uint32_t x = static_cast<uint32_t>(rng.uniform(p.p()));
        uint32_t y = static_cast<uint32_t>(rng.uniform(p.p()));
        uint32_t c = static_cast<uint32_t>(rng.uniform(p.p()));
        CHECK(dec(key, eval_add(p, enc(key, x, rng), enc(key, y, rng))) == (x + y) % p.p());
        CHECK(dec(key, eval_pt_mul(p, c, enc(key, x, rng))) == (c * x) % p.p());
    }
}

TEST_CASE("noise oracle: inner product at maximum fan-in decrypts correctly") {
    // fan-in 2^12 of random-digit eval_pt_mul terms under default-style params
    auto rng = crypto::SecureRng::seeded(3);
    LweParams p;
    p.n = 256;  // fan-in, not dimension, drives the noise here
    p.n1 = 1;
    p.n2 = 1;
    p.slot_bytes = 1;
    auto key = make_key(p, rng);

    const uint32_t fan_in = 1u << 12;
    uint32_t expected = 0;
    Ciphertext acc;
    acc.a.assign(p.n, 0);
    acc.b = 0;
    for (uint32_t i = 0; i < fan_in; ++i) {
        uint32_t digit = static_cast<uint32_t>(rng.uniform(p.p()));
        uint32_t msg = static_cast<uint32_t>(rng.uniform(p.p()));
        acc = eval_add(p, acc, eval_pt_mul(p, digit, enc(key, msg, rng)));
        expected = (expected + digit * msg) % p.p();
    }
    CHECK(dec(key, acc) == expected);
    CHECK(noise_margin(p, fan_in) > 0);
}

TEST_CASE("noise margin is monotone in fan-in and gates bad configurations") {
    LweParams p = small_params();
    CHECK(noise_margin(p, 1) > noise_margin(p, uint64_t{1} << 14));
    CHECK(noise_margin(p, p.n1) > 0);

    // raising p_bits erodes the budget until the margin goes negative
    LweParams hot = p;
    hot.p_bits = 8;
    double m8 = noise_margin(hot, 1024);
    hot.p_bits = 16;  // not servable: margin must be negative
    CHECK(noise_margin(hot, 1024) < 0);
    CHECK(m8 > noise_margin(hot, 1024));
}

TEST_CASE("error sampler matches the requested variance") {
    auto rng = crypto::SecureRng::seeded(4);
    const double sigma = 6.4;
    const int n = 20000;
    double sum = 0, sum_sq = 0;
    for (int i = 0; i < n; ++i) {
        double e = sample_error(sigma, rng);
        sum += e;
        sum_sq += e * e;
    }
    double mean = sum / n;
    double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.25);
    CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.05));
}

TEST_CASE("digit codec round-trips for every supported p_bits") {
    auto rng = crypto::SecureRng::seeded(5);
    for (uint32_t p_bits : {1u, 2u, 4u, 8u}) {
        LweParams p = small_params();
        p.p_bits = p_bits;
        std::vector<uint8_t> bytes(64);
        rng.fill(bytes);
        std::vector<uint8_t> digits(bytes.size() * p.digits_per_byte());
        std::vector<uint8_t> back(bytes.size());
        bytes_to_digits(p, bytes, digits);
        for (uint8_t d : digits) CHECK(d < p.p());
        digits_to_bytes(p, digits, back);
        CHECK(back == bytes);
    }
}

TEST_CASE("parameter validation rejects bad configurations") {
    LweParams p = small_params();
    CHECK_NOTHROW(p.validate());
    LweParams bad = p;
    bad.p_bits = 3;
    CHECK_THROWS(bad.validate());
    bad = p;
    bad.p_bits = 32;
    CHECK_THROWS(bad.validate());
    bad = p;
    bad.dims = 3;
    CHECK_THROWS(bad.validate());
    bad = p;
    bad.n2 = 4;  // dims == 1 requires n2 == 1
    CHECK_THROWS(bad.validate());
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "bdns/delay.hpp"

using namespace bdns;

namespace {

// two-sided Kolmogorov-Smirnov distance between samples and the model CDF
double ks_distance(std::vector<uint64_t> samples, const DelayDistribution& dist) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0;
    size_t i = 0;
    while (i < samples.size()) {
        size_t j = i;
        while (j < samples.size() && samples[j] == samples[i]) ++j;
        uint64_t x = samples[i];
        double cdf = dist.pmf(x);
        for (uint64_t k = 0; k < x; ++k) cdf += dist.pmf(k);  // small supports only
        double emp_lo = static_cast<double>(i) / n;
        double emp_hi = static_cast<double>(j) / n;
        d = std::max({d, std::abs(cdf - emp_hi), std::abs((cdf - dist.pmf(x)) - emp_lo)});
        i = j;
    }
    return d;
}

}  // namespace

TEST_CASE("fixed delay is deterministic") {
    auto rng = crypto::SecureRng::seeded(50);
    auto d = DelayDistribution::fixed(0);
    for (int i = 0; i < 10; ++i) CHECK(d.sample(rng) == 0);
    CHECK(DelayDistribution::fixed(17).sample(rng) == 17);
}

TEST_CASE("uniform 0..2*delta sampling mean approaches delta") {
    auto rng = crypto::SecureRng::seeded(51);
    const uint64_t delta = 31;
    auto d = DelayDistribution::uniform(0, 2 * delta);
    double sum = 0;
    const int n = 10'000;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(d.sample(rng));
    CHECK(sum / n == doctest::Approx(static_cast<double>(delta)).epsilon(0.05));
}

TEST_CASE("geometric sampling mean approaches 1/p") {
    auto rng = crypto::SecureRng::seeded(52);
    const double delta = 31;
    auto d = DelayDistribution::geometric(1.0 / delta);
    double sum = 0;
    const int n = 10'000;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(d.sample(rng));
    CHECK(sum / n == doctest::Approx(delta).epsilon(0.05));
}

TEST_CASE("sampled delays match the configured distribution (KS at 0.001)") {
    // critical value c(0.001)/sqrt(n) with c = 1.949
    auto rng = crypto::SecureRng::seeded(53);
    const int n = 10'000;
    const double critical = 1.949 / std::sqrt(static_cast<double>(n));

    for (auto dist : {DelayDistribution::uniform(0, 62),
                      DelayDistribution::geometric(1.0 / 31.0)}) {
        std::vector<uint64_t> samples(n);
        for (auto& s : samples) s = dist.sample(rng);
        CHECK(ks_distance(samples, dist) < critical);
    }
}

TEST_CASE("distribution text form round-trips") {
    for (const char* text : {"fixed:5", "uniform:0:62", "geometric:0.032258"}) {
        auto d = DelayDistribution::parse(text);
        auto d2 = DelayDistribution::parse(d.to_string());
        CHECK(d2.kind == d.kind);
        CHECK(d2.mean() == doctest::Approx(d.mean()));
    }
    CHECK_THROWS(DelayDistribution::parse("triangle:1:2"));
    CHECK_THROWS(DelayDistribution::geometric(0.0));
    CHECK_THROWS(DelayDistribution::uniform(5, 2));
}

TEST_CASE("pmf sums to one over the support") {
    auto u = DelayDistribution::uniform(0, 62);
    double total = 0;
    for (uint64_t k = 0; k <= 62; ++k) total += u.pmf(k);
    CHECK(total == doctest::Approx(1.0));

    auto g = DelayDistribution::geometric(0.25);
    total = 0;
    for (uint64_t k = 0; k <= 200; ++k) total += g.pmf(k);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(g.tail_mass(100) == doctest::Approx(std::pow(0.75, 99)).epsilon(1e-9));
}

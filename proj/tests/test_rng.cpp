#include <doctest.h>

#include <cmath>
#include <set>

#include "aeslab/rng.hpp"

using namespace aeslab;

// Reference outputs of the published splitmix64; the same vectors live in
// docs/rng.md. An independent big-integer implementation of the spec
// produced them.
TEST_CASE("splitmix64 reference vectors") {
    SplitMix64 zero(0);
    CHECK(zero.next() == 0xE220A8397B1DCDAFULL);
    CHECK(zero.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(zero.next() == 0x06C45D188009454FULL);

    SplitMix64 patterned(0x123456789ABCDEF0ULL);
    CHECK(patterned.next() == 0x161922C645CE50E8ULL);
    CHECK(patterned.next() == 0xAD760CAFA1697B60ULL);
    CHECK(patterned.next() == 0x3501FF44902CA50DULL);

    SplitMix64 forty_two(42);
    CHECK(forty_two.next() == 0xBDD732262FEB6E95ULL);
    CHECK(forty_two.next() == 0x28EFE333B266F103ULL);
    CHECK(forty_two.next() == 0x47526757130F9F52ULL);
}

TEST_CASE("derive_seed equals random access into the stream") {
    for (std::uint64_t seed : {0ULL, 42ULL, 0xDEADBEEFULL}) {
        SplitMix64 stream(seed);
        for (std::uint64_t i = 0; i < 10; ++i) {
            CHECK(derive_seed(seed, i) == stream.next());
        }
    }
}

TEST_CASE("domain seeds are distinct") {
    std::set<std::uint64_t> seen;
    for (auto domain : {SeedDomain::BlockStream, SeedDomain::ClockStream,
                        SeedDomain::ExperimentKey, SeedDomain::TrainTestSplit,
                        SeedDomain::TreeStream}) {
        seen.insert(domain_seed(42, domain));
    }
    CHECK(seen.size() == 5);
}

TEST_CASE("next_double stays in [0, 1)") {
    SplitMix64 rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("bernoulli edge probabilities") {
    SplitMix64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        CHECK_FALSE(rng.bernoulli(0.0));
        CHECK(rng.bernoulli(1.0));
    }
}

TEST_CASE("uniform respects bounds") {
    SplitMix64 rng(11);
    for (int i = 0; i < 10000; ++i) {
        const double x = rng.uniform(5.0, 20.0);
        CHECK(x >= 5.0);
        CHECK(x <= 20.0);
    }
}

TEST_CASE("truncated normal respects the floor and tracks the mean") {
    SplitMix64 rng(13);
    const double mean = 0.1, sigma = 0.01, floor = 0.01;
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.truncated_normal(mean, sigma, floor);
        CHECK(x >= floor);
        sum += x;
    }
    // sample mean within 5 standard errors
    CHECK(std::abs(sum / n - mean) < 5.0 * sigma / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("shuffle is a permutation and deterministic") {
    std::vector<int> values{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    SplitMix64 a(99), b(99);
    auto first = values;
    a.shuffle(first);
    auto second = values;
    b.shuffle(second);
    CHECK(first == second);
    std::sort(second.begin(), second.end());
    CHECK(second == values);
}

TEST_CASE("sample_indices returns k distinct sorted values") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        auto picked = rng.sample_indices(17, 4);
        REQUIRE(picked.size() == 4);
        CHECK(std::is_sorted(picked.begin(), picked.end()));
        CHECK(std::set<std::size_t>(picked.begin(), picked.end()).size() == 4);
        CHECK(picked.back() < 17);
    }
}

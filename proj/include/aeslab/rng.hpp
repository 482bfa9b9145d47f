#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace aeslab {

// All randomness in this project flows through SplitMix64 streams derived
// from a single master seed. The generator, the stream-derivation rule and
// every distribution built on top of them are specified in docs/rng.md with
// test vectors, so independent reimplementations can reproduce runs bit for
// bit. Do not swap in std::mt19937 or std::*_distribution anywhere: their
// outputs are not portable across standard libraries.

inline constexpr std::uint64_t kSplitMix64Gamma = 0x9E3779B97F4A7C15ULL;

// Finalizer from the reference splitmix64 (Steele/Lea/Vigna).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// index-th output of a SplitMix64 sequence seeded with `seed`, computed in
// O(1). Seeds independent child streams.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + kSplitMix64Gamma * (index + 1));
}

// Fixed labels for the independent sub-streams of one experiment. Changing
// these values changes every seeded run, so they are part of the format.
enum class SeedDomain : std::uint64_t {
    BlockStream = 1,    // per-block plaintext + anomaly draws
    ClockStream = 2,    // simulated baseline durations
    ExperimentKey = 3,  // the run's AES key
    TrainTestSplit = 4, // dataset shuffle for the split
    TreeStream = 5,     // per-tree bootstrap + feature subsets
};

constexpr std::uint64_t domain_seed(std::uint64_t master_seed, SeedDomain domain) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(domain));
}

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += kSplitMix64Gamma;
        return mix64(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound). Plain modulo; the bias is below 2^-50
    // for every bound used here and the rule is trivial to re-implement.
    std::uint64_t next_below(std::uint64_t bound) {
        return next() % bound;
    }

    // Uniform real in [lo, hi].
    double uniform(double lo, double hi) {
        return lo + next_double() * (hi - lo);
    }

    // Bernoulli(p): strict comparison, so p = 0 never fires and p = 1 always does.
    bool bernoulli(double p) {
        return next_double() < p;
    }

    // Box-Muller, cosine branch only. u1 is shifted into (0, 1] so the log is
    // always finite.
    double normal(double mean, double sigma) {
        double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
        double u2 = next_double();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
        return mean + sigma * z;
    }

    // Normal resampled until the value reaches `floor`.
    double truncated_normal(double mean, double sigma, double floor) {
        double x = normal(mean, sigma);
        while (x < floor) {
            x = normal(mean, sigma);
        }
        return x;
    }

    // Fisher-Yates, descending index.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

    // k distinct values from {0, ..., n-1} via partial Fisher-Yates,
    // returned in ascending order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;
    std::uint64_t state_;
};

}  // namespace aeslab

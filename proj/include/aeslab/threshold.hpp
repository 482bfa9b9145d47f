#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "aeslab/harness.hpp"

namespace aeslab {

struct EmptyDurationsError : std::invalid_argument {
    EmptyDurationsError() : std::invalid_argument("no durations: threshold undefined for n = 0") {}
};

// threshold_ns = mean + 3 * (max - min) / count. The divisor is the total
// block count, so the margin above the mean shrinks as runs grow; that is
// the rule as defined, not a bug.
struct TimingStats {
    double mean_ns = 0.0;
    std::uint64_t min_ns = 0;
    std::uint64_t max_ns = 0;
    std::uint64_t count = 0;
    double threshold_ns = 0.0;

    bool operator==(const TimingStats&) const = default;
};

// Double-precision arithmetic over nanosecond magnitudes. Throws
// EmptyDurationsError on empty input.
TimingStats compute_threshold(std::span<const std::uint64_t> durations_ns);

std::vector<std::uint64_t> durations_of(std::span<const EncryptionRecord> records);

// Sets flagged_threshold = duration_ns > threshold_ns (strict; equality
// does not flag).
void apply_threshold(std::span<EncryptionRecord> records, const TimingStats& stats);

}  // namespace aeslab

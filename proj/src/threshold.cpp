#include "aeslab/threshold.hpp"

namespace aeslab {

TimingStats compute_threshold(std::span<const std::uint64_t> durations_ns) {
    if (durations_ns.empty()) {
        throw EmptyDurationsError{};
    }
    TimingStats stats;
    stats.count = durations_ns.size();
    stats.min_ns = durations_ns[0];
    stats.max_ns = durations_ns[0];
    std::uint64_t sum = 0;
    for (std::uint64_t d : durations_ns) {
        sum += d;
        if (d < stats.min_ns) stats.min_ns = d;
        if (d > stats.max_ns) stats.max_ns = d;
    }
    stats.mean_ns = static_cast<double>(sum) / static_cast<double>(stats.count);
    stats.threshold_ns = stats.mean_ns + 3.0 * static_cast<double>(stats.max_ns - stats.min_ns) /
                                             static_cast<double>(stats.count);
    return stats;
}

std::vector<std::uint64_t> durations_of(std::span<const EncryptionRecord> records) {
    std::vector<std::uint64_t> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.duration_ns);
    return out;
}

void apply_threshold(std::span<EncryptionRecord> records, const TimingStats& stats) {
    for (auto& r : records) {
        r.flagged_threshold = static_cast<double>(r.duration_ns) > stats.threshold_ns;
    }
}

}  // namespace aeslab

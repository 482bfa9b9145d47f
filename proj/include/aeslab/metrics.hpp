#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "aeslab/harness.hpp"

namespace aeslab {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionCounts&) const = default;
};

// Ratios are left unset when their denominator is zero; serialization turns
// that into null rather than a fake 0.
struct DetectionMetrics {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;

    bool operator==(const DetectionMetrics&) const = default;
};

DetectionMetrics metrics_from(const ConfusionCounts& counts);

enum class VerdictKind : std::uint8_t { Threshold, Ml };

std::string_view to_string(VerdictKind kind);

// Positive class = anomalous ground truth. Threshold verdicts must be set on
// every record; ML verdicts on every test-split record (other records with a
// set ML verdict are counted too, which is how whole-run evaluations work).
// Throws std::invalid_argument when a required verdict is missing or nothing
// was evaluated.
ConfusionCounts confusion(std::span<const EncryptionRecord> records, VerdictKind kind);

}  // namespace aeslab

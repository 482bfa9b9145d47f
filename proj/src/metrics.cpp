#include "aeslab/metrics.hpp"

#include <stdexcept>
#include <string>

namespace aeslab {

DetectionMetrics metrics_from(const ConfusionCounts& c) {
    DetectionMetrics m;
    const std::uint64_t total = c.total();
    if (total > 0) {
        m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
    }
    if (c.tp + c.fp > 0) {
        m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    }
    if (c.tp + c.fn > 0) {
        m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    }
    if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0) {
        m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    }
    return m;
}

std::string_view to_string(VerdictKind kind) {
    return kind == VerdictKind::Threshold ? "threshold" : "ml";
}

ConfusionCounts confusion(std::span<const EncryptionRecord> records, VerdictKind kind) {
    ConfusionCounts counts;
    std::uint64_t evaluated = 0;
    for (const auto& r : records) {
        const auto& verdict = kind == VerdictKind::Threshold ? r.flagged_threshold : r.flagged_ml;
        if (!verdict.has_value()) {
            const bool required = kind == VerdictKind::Threshold || r.split == SplitTag::Test;
            if (required) {
                throw std::invalid_argument("record " + std::to_string(r.index) + " has no " +
                                            std::string(to_string(kind)) + " verdict");
            }
            continue;
        }
        ++evaluated;
        const bool truth = r.anomaly.is_anomalous();
        if (truth && *verdict) ++counts.tp;
        else if (!truth && *verdict) ++counts.fp;
        else if (truth && !*verdict) ++counts.fn;
        else ++counts.tn;
    }
    if (evaluated == 0) {
        throw std::invalid_argument(std::string("no records carry a ") +
                                    std::string(to_string(kind)) + " verdict");
    }
    return counts;
}

}  // namespace aeslab

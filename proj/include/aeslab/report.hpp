#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "aeslab/forest.hpp"
#include "aeslab/harness.hpp"
#include "aeslab/metrics.hpp"
#include "aeslab/threshold.hpp"

namespace aeslab {

// Column order is a format guarantee; parsers reject anything else.
inline constexpr std::string_view kCsvHeader =
    "block_index,anomaly_injected,delay_ms,plaintext_hex,ciphertext_hex,"
    "encryption_time_ns,flagged_threshold,flagged_ml,split";

// One row per record: delay_ms has 3 fractional digits (empty unless the
// anomaly is a delay), hex fields are 32 lowercase chars, booleans are
// true/false or empty when not evaluated.
void write_csv(std::span<const EncryptionRecord> records, const std::filesystem::path& path);
std::vector<EncryptionRecord> read_csv(const std::filesystem::path& path);

enum class DetectorChoice : std::uint8_t { Threshold, Forest, Both };

std::string_view to_string(DetectorChoice choice);
DetectorChoice detector_choice_from_string(std::string_view name);

struct DetectorReport {
    std::string population;  // which records were scored: "all" or "test"
    std::uint64_t evaluated = 0;
    ConfusionCounts counts;
    DetectionMetrics metrics;

    bool operator==(const DetectorReport&) const = default;
};

struct DatasetCounts {
    std::uint64_t blocks = 0;
    std::uint64_t benign = 0;
    std::uint64_t delay = 0;
    std::uint64_t fault = 0;

    std::uint64_t anomalous() const { return delay + fault; }
    bool operator==(const DatasetCounts&) const = default;
};

DatasetCounts count_dataset(std::span<const EncryptionRecord> records);

struct SplitSummary {
    std::uint64_t train_count = 0;
    std::uint64_t test_count = 0;
    bool stratified = true;

    bool operator==(const SplitSummary&) const = default;
};

// Everything needed to reproduce a simulated run bit-exactly, plus the
// results. Timestamps sit in their own object so determinism checks can
// drop them wholesale.
struct RunManifest {
    std::string tool_version;
    ExperimentConfig config;
    DetectorChoice detector = DetectorChoice::Both;
    double test_fraction = 0.3;
    ForestHyperparams forest;
    std::string experiment_key_hex;
    DatasetCounts dataset;
    TimingStats timing;
    std::optional<SplitSummary> split;
    std::optional<DetectorReport> threshold_report;
    std::optional<DetectorReport> ml_report;
    std::string started_at;
    std::string finished_at;

    bool operator==(const RunManifest&) const = default;
};

nlohmann::ordered_json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::ordered_json& j);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

std::string utc_timestamp();

}  // namespace aeslab

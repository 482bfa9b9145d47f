#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "aeslab/aes128.hpp"
#include "aeslab/clock.hpp"
#include "aeslab/dataset.hpp"

namespace aeslab {

enum class SplitTag : std::uint8_t { All, Train, Test };

std::string_view to_string(SplitTag tag);
SplitTag split_tag_from_string(std::string_view name);

// Which per-block features the classifier sees. Carried through the config
// so a run's model and CSV stay interpretable on their own.
enum class FeatureMode : std::uint8_t { TimeOnly, TimePlusPlaintext, TimePlusCiphertext };

std::string_view to_string(FeatureMode mode);
FeatureMode feature_mode_from_string(std::string_view name);

struct EncryptionRecord {
    std::uint64_t index = 0;
    Block16 plaintext{};  // the block as encrypted — fault mutation included
    Block16 ciphertext{};
    Anomaly anomaly{};  // ground truth
    std::uint64_t duration_ns = 0;
    std::optional<bool> flagged_threshold;
    std::optional<bool> flagged_ml;
    SplitTag split = SplitTag::All;

    bool operator==(const EncryptionRecord&) const = default;
};

enum class ClockMode : std::uint8_t { Real, Simulated };

std::string_view to_string(ClockMode mode);
ClockMode clock_mode_from_string(std::string_view name);

struct TimingModelConfig {
    ClockMode mode = ClockMode::Simulated;
    double baseline_mean_ms = 0.1;
    double baseline_jitter_ms = 0.01;

    bool operator==(const TimingModelConfig&) const = default;
};

struct ExperimentConfig {
    InjectionConfig injection;
    unsigned worker_count = 4;
    TimingModelConfig timing;
    FeatureMode feature_mode = FeatureMode::TimePlusCiphertext;

    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

// The run's AES key, taken from the key stream of the master seed and
// recorded in the manifest.
Aes128Key derive_experiment_key(std::uint64_t master_seed);

// Delay blocks stall (or simulate) their assigned duration, then encrypt;
// the measured window covers stall + encryption. Flags are left unset.
EncryptionRecord measure_one(const LabeledBlock& block, const KeySchedule& schedule,
                             Clock& clock);

// Processes blocks on up to worker_count workers and returns records in
// index order no matter how the pool schedules them. All-or-nothing: any
// failure throws and no partial results escape.
std::vector<EncryptionRecord> run_blocks(std::span<const LabeledBlock> blocks,
                                         const KeySchedule& schedule, Clock& clock,
                                         unsigned worker_count);

// generate_blocks + key derivation + run_blocks, with the clock built from
// config. Simulated-mode output is a pure function of the config.
std::vector<EncryptionRecord> run_experiment(const ExperimentConfig& config);

}  // namespace aeslab

#include "aeslab/harness.hpp"

#include <memory>
#include <stdexcept>
#include <string>

#include "aeslab/parallel.hpp"
#include "aeslab/rng.hpp"

namespace aeslab {

std::string_view to_string(SplitTag tag) {
    switch (tag) {
        case SplitTag::All: return "all";
        case SplitTag::Train: return "train";
        case SplitTag::Test: return "test";
    }
    throw std::logic_error("unreachable split tag");
}

SplitTag split_tag_from_string(std::string_view name) {
    if (name == "all") return SplitTag::All;
    if (name == "train") return SplitTag::Train;
    if (name == "test") return SplitTag::Test;
    throw std::invalid_argument("unknown split tag \"" + std::string(name) + "\"");
}

std::string_view to_string(FeatureMode mode) {
    switch (mode) {
        case FeatureMode::TimeOnly: return "time";
        case FeatureMode::TimePlusPlaintext: return "time+plain";
        case FeatureMode::TimePlusCiphertext: return "time+cipher";
    }
    throw std::logic_error("unreachable feature mode");
}

FeatureMode feature_mode_from_string(std::string_view name) {
    if (name == "time") return FeatureMode::TimeOnly;
    if (name == "time+plain") return FeatureMode::TimePlusPlaintext;
    if (name == "time+cipher") return FeatureMode::TimePlusCiphertext;
    throw std::invalid_argument("unknown feature mode \"" + std::string(name) + "\"");
}

std::string_view to_string(ClockMode mode) {
    switch (mode) {
        case ClockMode::Real: return "real";
        case ClockMode::Simulated: return "simulated";
    }
    throw std::logic_error("unreachable clock mode");
}

ClockMode clock_mode_from_string(std::string_view name) {
    if (name == "real") return ClockMode::Real;
    if (name == "simulated") return ClockMode::Simulated;
    throw std::invalid_argument("unknown clock mode \"" + std::string(name) + "\"");
}

void ExperimentConfig::validate() const {
    injection.validate();
    if (worker_count < 1) {
        throw std::invalid_argument("worker_count must be >= 1");
    }
    if (timing.mode == ClockMode::Simulated) {
        if (!(timing.baseline_mean_ms > 0.0)) {
            throw std::invalid_argument("baseline mean must be > 0 ms");
        }
        if (timing.baseline_jitter_ms < 0.0) {
            throw std::invalid_argument("baseline jitter must be >= 0 ms");
        }
    }
}

Aes128Key derive_experiment_key(std::uint64_t master_seed) {
    SplitMix64 rng(domain_seed(master_seed, SeedDomain::ExperimentKey));
    Aes128Key key;
    for (std::size_t half = 0; half < 2; ++half) {
        std::uint64_t word = rng.next();
        for (std::size_t i = 0; i < 8; ++i) {
            key.bytes[half * 8 + i] = static_cast<std::uint8_t>(word >> (8 * i));
        }
    }
    return key;
}

EncryptionRecord measure_one(const LabeledBlock& block, const KeySchedule& schedule,
                             Clock& clock) {
    EncryptionRecord record;
    record.index = block.index;
    record.plaintext = block.plaintext;
    record.anomaly = block.anomaly;

    const double delay_ms = block.anomaly.type == AnomalyType::Delay ? block.anomaly.delay_ms : 0.0;
    record.duration_ns = clock.measure(block.index, delay_ms, [&] {
        record.ciphertext = encrypt_block(block.plaintext, schedule);
    });
    return record;
}

std::vector<EncryptionRecord> run_blocks(std::span<const LabeledBlock> blocks,
                                         const KeySchedule& schedule, Clock& clock,
                                         unsigned worker_count) {
    std::vector<EncryptionRecord> records(blocks.size());
    parallel_for_index(blocks.size(), worker_count, [&](std::uint64_t i) {
        records[i] = measure_one(blocks[i], schedule, clock);
    });
    return records;
}

std::vector<EncryptionRecord> run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto blocks = generate_blocks(config.injection);
    const auto schedule = expand_key(derive_experiment_key(config.injection.master_seed));

    std::unique_ptr<Clock> clock;
    if (config.timing.mode == ClockMode::Simulated) {
        clock = std::make_unique<SimulatedClock>(config.timing.baseline_mean_ms,
                                                 config.timing.baseline_jitter_ms,
                                                 config.injection.master_seed);
    } else {
        clock = std::make_unique<RealMonotonicClock>();
    }
    return run_blocks(blocks, schedule, *clock, config.worker_count);
}

}  // namespace aeslab

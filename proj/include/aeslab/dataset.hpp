#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "aeslab/bytes.hpp"

namespace aeslab {

enum class AnomalyType : std::uint8_t { None, Delay, Fault };

std::string_view to_string(AnomalyType type);
AnomalyType anomaly_type_from_string(std::string_view name);

struct Anomaly {
    AnomalyType type = AnomalyType::None;
    double delay_ms = 0.0;  // meaningful only when type == Delay

    static Anomaly none() { return {}; }
    static Anomaly delay(double ms) { return {AnomalyType::Delay, ms}; }
    static Anomaly fault() { return {AnomalyType::Fault, 0.0}; }

    bool is_anomalous() const { return type != AnomalyType::None; }
    bool operator==(const Anomaly&) const = default;
};

enum class PlaintextSource : std::uint8_t { UniformRandom, PrintableAscii };

std::string_view to_string(PlaintextSource source);
PlaintextSource plaintext_source_from_string(std::string_view name);

struct InjectionConfig {
    std::uint64_t block_count = 0;
    double anomaly_ratio = 0.2;
    double delay_min_ms = 5.0;
    double delay_max_ms = 20.0;
    PlaintextSource plaintext_source = PlaintextSource::UniformRandom;
    std::uint64_t master_seed = 0;

    // Throws std::invalid_argument on out-of-range fields.
    void validate() const;
    bool operator==(const InjectionConfig&) const = default;
};

struct LabeledBlock {
    std::uint64_t index = 0;
    Block16 plaintext{};           // what actually gets encrypted (post-mutation)
    Block16 original_plaintext{};  // as generated (pre-mutation)
    Anomaly anomaly{};

    bool operator==(const LabeledBlock&) const = default;
};

// Pure function of the config: per-block draws come from streams derived
// from (master_seed, index), so the result is the same for any evaluation
// order. Draw order per block is fixed in docs/rng.md.
std::vector<LabeledBlock> generate_blocks(const InjectionConfig& config);

// Byte 0 XOR 0xFF, bytes 1..15 unchanged. Involution.
Block16 apply_fault(const Block16& block);

// Zero-pad short input, keep the first 16 bytes of long input.
Block16 pad_or_truncate(std::span<const std::uint8_t> data);

}  // namespace aeslab

#include "aeslab/dataset.hpp"

#include <stdexcept>
#include <string>

#include "aeslab/rng.hpp"

namespace aeslab {

std::string_view to_string(AnomalyType type) {
    switch (type) {
        case AnomalyType::None: return "none";
        case AnomalyType::Delay: return "delay";
        case AnomalyType::Fault: return "fault";
    }
    throw std::logic_error("unreachable anomaly type");
}

AnomalyType anomaly_type_from_string(std::string_view name) {
    if (name == "none") return AnomalyType::None;
    if (name == "delay") return AnomalyType::Delay;
    if (name == "fault") return AnomalyType::Fault;
    throw std::invalid_argument("unknown anomaly type \"" + std::string(name) + "\"");
}

std::string_view to_string(PlaintextSource source) {
    switch (source) {
        case PlaintextSource::UniformRandom: return "random";
        case PlaintextSource::PrintableAscii: return "ascii";
    }
    throw std::logic_error("unreachable plaintext source");
}

PlaintextSource plaintext_source_from_string(std::string_view name) {
    if (name == "random") return PlaintextSource::UniformRandom;
    if (name == "ascii") return PlaintextSource::PrintableAscii;
    throw std::invalid_argument("unknown plaintext source \"" + std::string(name) + "\"");
}

void InjectionConfig::validate() const {
    if (!(anomaly_ratio >= 0.0 && anomaly_ratio <= 1.0)) {
        throw std::invalid_argument("anomaly_ratio must be in [0, 1], got " +
                                    std::to_string(anomaly_ratio));
    }
    if (!(delay_min_ms > 0.0)) {
        throw std::invalid_argument("delay_min_ms must be > 0, got " +
                                    std::to_string(delay_min_ms));
    }
    if (!(delay_min_ms <= delay_max_ms)) {
        throw std::invalid_argument("delay range is empty: [" + std::to_string(delay_min_ms) +
                                    ", " + std::to_string(delay_max_ms) + "]");
    }
}

namespace {

LabeledBlock generate_one(const InjectionConfig& config, std::uint64_t block_seed_base,
                          std::uint64_t index) {
    SplitMix64 rng(derive_seed(block_seed_base, index));

    LabeledBlock block;
    block.index = index;
    for (auto& byte : block.original_plaintext) {
        byte = config.plaintext_source == PlaintextSource::PrintableAscii
                   ? static_cast<std::uint8_t>(0x20 + rng.next_below(95))
                   : static_cast<std::uint8_t>(rng.next_below(256));
    }

    if (rng.bernoulli(config.anomaly_ratio)) {
        block.anomaly = rng.next_below(2) == 0
                            ? Anomaly::delay(rng.uniform(config.delay_min_ms, config.delay_max_ms))
                            : Anomaly::fault();
    }

    block.plaintext = block.anomaly.type == AnomalyType::Fault
                          ? apply_fault(block.original_plaintext)
                          : block.original_plaintext;
    return block;
}

}  // namespace

std::vector<LabeledBlock> generate_blocks(const InjectionConfig& config) {
    config.validate();
    const std::uint64_t base = domain_seed(config.master_seed, SeedDomain::BlockStream);
    std::vector<LabeledBlock> blocks;
    blocks.reserve(config.block_count);
    for (std::uint64_t i = 0; i < config.block_count; ++i) {
        blocks.push_back(generate_one(config, base, i));
    }
    return blocks;
}

Block16 apply_fault(const Block16& block) {
    Block16 out = block;
    out[0] ^= 0xFF;
    return out;
}

Block16 pad_or_truncate(std::span<const std::uint8_t> data) {
    Block16 out{};
    const std::size_t n = data.size() < kBlockSize ? data.size() : kBlockSize;
    std::copy(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n), out.begin());
    return out;
}

}  // namespace aeslab

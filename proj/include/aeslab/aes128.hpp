#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aeslab/bytes.hpp"

namespace aeslab {

struct Aes128Key {
    Block16 bytes{};

    static Aes128Key from_bytes(std::span<const std::uint8_t> raw) {
        return Aes128Key{to_block(raw)};
    }
    bool operator==(const Aes128Key&) const = default;
};

// 11 round keys per FIPS-197 key expansion; round_keys[0] is the key itself.
struct KeySchedule {
    std::array<Block16, 11> round_keys{};
};

KeySchedule expand_key(const Aes128Key& key);
Block16 encrypt_block(const Block16& plain, const KeySchedule& schedule);
Block16 decrypt_block(const Block16& cipher, const KeySchedule& schedule);

struct SelftestResult {
    std::string name;
    bool passed = false;
};

// Known-answer suite (FIPS-197 vectors plus round-trip checks). The S-box
// override exists so harnesses can prove the suite catches table corruption;
// production callers use the default.
std::vector<SelftestResult> selftest();
std::vector<SelftestResult> selftest(std::span<const std::uint8_t, 256> sbox);

namespace aes_detail {
// Full cipher over caller-provided substitution table. Decryption inverts
// the given table, so a non-bijective table yields garbage round-trips —
// which is exactly what the corruption selftest looks for.
KeySchedule expand_key_with(const Aes128Key& key, std::span<const std::uint8_t, 256> sbox);
Block16 encrypt_with(const Block16& plain, const KeySchedule& schedule,
                     std::span<const std::uint8_t, 256> sbox);
Block16 decrypt_with(const Block16& cipher, const KeySchedule& schedule,
                     std::span<const std::uint8_t, 256> sbox);
std::span<const std::uint8_t, 256> canonical_sbox();
}  // namespace aes_detail

}  // namespace aeslab

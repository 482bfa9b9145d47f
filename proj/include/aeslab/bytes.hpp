#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aeslab {

inline constexpr std::size_t kBlockSize = 16;

// One AES block. Fixed size by construction; use to_block() to validate
// untrusted input lengths.
using Block16 = std::array<std::uint8_t, kBlockSize>;

// Throws std::invalid_argument unless bytes.size() == 16.
Block16 to_block(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

// Convenience for 32-char hex strings; throws on anything else.
Block16 block_from_hex(std::string_view hex);

}  // namespace aeslab

#include "aeslab/bytes.hpp"

#include <stdexcept>

namespace aeslab {

Block16 to_block(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kBlockSize) {
        throw std::invalid_argument("expected exactly 16 bytes, got " +
                                    std::to_string(bytes.size()));
    }
    Block16 out{};
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0F]);
    }
    return out;
}

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::vector<std::uint8_t> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) {
        throw std::invalid_argument("hex string has odd length");
    }
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            throw std::invalid_argument("invalid hex digit in \"" + std::string(hex) + "\"");
        }
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

Block16 block_from_hex(std::string_view hex) {
    return to_block(from_hex(hex));
}

}  // namespace aeslab

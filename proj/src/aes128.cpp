#include "aeslab/aes128.hpp"

#include <cstring>

namespace aeslab {

namespace {

// FIPS-197 figure 7.
constexpr std::uint8_t kSbox[256] = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16};

constexpr std::uint8_t kRcon[10] = {0x01, 0x02, 0x04, 0x08, 0x10,
                                    0x20, 0x40, 0x80, 0x1b, 0x36};

// GF(2^8) multiply by x (polynomial 0x11b).
constexpr std::uint8_t xtime(std::uint8_t a) {
    return static_cast<std::uint8_t>((a << 1) ^ ((a >> 7) * 0x1b));
}

std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
    std::uint8_t p = 0;
    while (b) {
        if (b & 1) p ^= a;
        a = xtime(a);
        b >>= 1;
    }
    return p;
}

using Sbox = std::span<const std::uint8_t, 256>;

std::array<std::uint8_t, 256> invert_sbox(Sbox sbox) {
    std::array<std::uint8_t, 256> inv{};
    for (int i = 0; i < 256; ++i) {
        inv[sbox[static_cast<std::size_t>(i)]] = static_cast<std::uint8_t>(i);
    }
    return inv;
}

void add_round_key(Block16& state, const Block16& rk) {
    for (std::size_t i = 0; i < kBlockSize; ++i) state[i] ^= rk[i];
}

void sub_bytes(Block16& state, Sbox sbox) {
    for (auto& b : state) b = sbox[b];
}

// State is column-major: byte i sits at row i%4, column i/4.
void shift_rows(Block16& s) {
    std::uint8_t t;
    t = s[1]; s[1] = s[5]; s[5] = s[9]; s[9] = s[13]; s[13] = t;
    std::swap(s[2], s[10]);
    std::swap(s[6], s[14]);
    t = s[15]; s[15] = s[11]; s[11] = s[7]; s[7] = s[3]; s[3] = t;
}

void inv_shift_rows(Block16& s) {
    std::uint8_t t;
    t = s[13]; s[13] = s[9]; s[9] = s[5]; s[5] = s[1]; s[1] = t;
    std::swap(s[2], s[10]);
    std::swap(s[6], s[14]);
    t = s[3]; s[3] = s[7]; s[7] = s[11]; s[11] = s[15]; s[15] = t;
}

void mix_columns(Block16& s) {
    for (std::size_t c = 0; c < 4; ++c) {
        std::uint8_t* col = s.data() + 4 * c;
        std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
        std::uint8_t all = static_cast<std::uint8_t>(a0 ^ a1 ^ a2 ^ a3);
        col[0] = static_cast<std::uint8_t>(a0 ^ all ^ xtime(static_cast<std::uint8_t>(a0 ^ a1)));
        col[1] = static_cast<std::uint8_t>(a1 ^ all ^ xtime(static_cast<std::uint8_t>(a1 ^ a2)));
        col[2] = static_cast<std::uint8_t>(a2 ^ all ^ xtime(static_cast<std::uint8_t>(a2 ^ a3)));
        col[3] = static_cast<std::uint8_t>(a3 ^ all ^ xtime(static_cast<std::uint8_t>(a3 ^ a0)));
    }
}

void inv_mix_columns(Block16& s) {
    for (std::size_t c = 0; c < 4; ++c) {
        std::uint8_t* col = s.data() + 4 * c;
        std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
        col[0] = static_cast<std::uint8_t>(gmul(a0, 14) ^ gmul(a1, 11) ^ gmul(a2, 13) ^ gmul(a3, 9));
        col[1] = static_cast<std::uint8_t>(gmul(a0, 9) ^ gmul(a1, 14) ^ gmul(a2, 11) ^ gmul(a3, 13));
        col[2] = static_cast<std::uint8_t>(gmul(a0, 13) ^ gmul(a1, 9) ^ gmul(a2, 14) ^ gmul(a3, 11));
        col[3] = static_cast<std::uint8_t>(gmul(a0, 11) ^ gmul(a1, 13) ^ gmul(a2, 9) ^ gmul(a3, 14));
    }
}

}  // namespace

namespace aes_detail {

Sbox canonical_sbox() {
    return Sbox(kSbox);
}

KeySchedule expand_key_with(const Aes128Key& key, Sbox sbox) {
    // 44 words, 4 per round key.
    std::uint8_t w[44][4];
    std::memcpy(w, key.bytes.data(), kBlockSize);
    for (std::size_t i = 4; i < 44; ++i) {
        std::uint8_t t[4] = {w[i - 1][0], w[i - 1][1], w[i - 1][2], w[i - 1][3]};
        if (i % 4 == 0) {
            std::uint8_t first = t[0];  // RotWord
            t[0] = sbox[t[1]];
            t[1] = sbox[t[2]];
            t[2] = sbox[t[3]];
            t[3] = sbox[first];
            t[0] ^= kRcon[i / 4 - 1];
        }
        for (std::size_t b = 0; b < 4; ++b) {
            w[i][b] = static_cast<std::uint8_t>(w[i - 4][b] ^ t[b]);
        }
    }
    KeySchedule schedule;
    for (std::size_t r = 0; r < 11; ++r) {
        std::memcpy(schedule.round_keys[r].data(), w[4 * r], kBlockSize);
    }
    return schedule;
}

Block16 encrypt_with(const Block16& plain, const KeySchedule& schedule, Sbox sbox) {
    Block16 state = plain;
    add_round_key(state, schedule.round_keys[0]);
    for (std::size_t round = 1; round < 10; ++round) {
        sub_bytes(state, sbox);
        shift_rows(state);
        mix_columns(state);
        add_round_key(state, schedule.round_keys[round]);
    }
    sub_bytes(state, sbox);
    shift_rows(state);
    add_round_key(state, schedule.round_keys[10]);
    return state;
}

Block16 decrypt_with(const Block16& cipher, const KeySchedule& schedule, Sbox sbox) {
    const auto inv = invert_sbox(sbox);
    Block16 state = cipher;
    add_round_key(state, schedule.round_keys[10]);
    for (std::size_t round = 9; round > 0; --round) {
        inv_shift_rows(state);
        sub_bytes(state, Sbox(inv));
        add_round_key(state, schedule.round_keys[round]);
        inv_mix_columns(state);
    }
    inv_shift_rows(state);
    sub_bytes(state, Sbox(inv));
    add_round_key(state, schedule.round_keys[0]);
    return state;
}

}  // namespace aes_detail

KeySchedule expand_key(const Aes128Key& key) {
    return aes_detail::expand_key_with(key, aes_detail::canonical_sbox());
}

Block16 encrypt_block(const Block16& plain, const KeySchedule& schedule) {
    return aes_detail::encrypt_with(plain, schedule, aes_detail::canonical_sbox());
}

Block16 decrypt_block(const Block16& cipher, const KeySchedule& schedule) {
    return aes_detail::decrypt_with(cipher, schedule, aes_detail::canonical_sbox());
}

namespace {

struct KatVector {
    const char* name;
    const char* key_hex;
    const char* plain_hex;
    const char* cipher_hex;
};

// FIPS-197 Appendix B and C.1, plus the all-zero vector.
constexpr KatVector kKats[] = {
    {"fips197-c1", "000102030405060708090a0b0c0d0e0f",
     "00112233445566778899aabbccddeeff", "69c4e0d86a7b0430d8cdb78070b4c55a"},
    {"fips197-appendix-b", "2b7e151628aed2a6abf7158809cf4f3c",
     "3243f6a8885a308d313198a2e0370734", "3925841d02dc09fbdc118597196a0b32"},
    {"all-zero", "00000000000000000000000000000000",
     "00000000000000000000000000000000", "66e94bd4ef8a2c3b884cfa59ca342b2e"},
};

}  // namespace

std::vector<SelftestResult> selftest(std::span<const std::uint8_t, 256> sbox) {
    std::vector<SelftestResult> results;
    for (const auto& kat : kKats) {
        const auto key = Aes128Key{block_from_hex(kat.key_hex)};
        const auto plain = block_from_hex(kat.plain_hex);
        const auto expected = block_from_hex(kat.cipher_hex);
        const auto schedule = aes_detail::expand_key_with(key, sbox);

        const auto cipher = aes_detail::encrypt_with(plain, schedule, sbox);
        results.push_back({std::string(kat.name) + "-encrypt", cipher == expected});
        const auto back = aes_detail::decrypt_with(cipher, schedule, sbox);
        results.push_back({std::string(kat.name) + "-roundtrip", back == plain});
    }

    // Key-expansion walkthrough: last round key for the Appendix B key.
    {
        const auto key = Aes128Key{block_from_hex("2b7e151628aed2a6abf7158809cf4f3c")};
        const auto schedule = aes_detail::expand_key_with(key, sbox);
        const auto expected = block_from_hex("d014f9a8c9ee2589e13f0cc8b6630ca6");
        results.push_back({"fips197-key-expansion", schedule.round_keys[10] == expected});
    }

    // Decryption against an independently computed vector.
    {
        const auto key = Aes128Key{Block16{}};
        const auto schedule = aes_detail::expand_key_with(key, sbox);
        const auto plain = aes_detail::decrypt_with(Block16{}, schedule, sbox);
        const auto expected = block_from_hex("140f0f1011b5223d79587717ffd9ec3a");
        results.push_back({"all-zero-decrypt", plain == expected});
    }
    return results;
}

std::vector<SelftestResult> selftest() {
    return selftest(aes_detail::canonical_sbox());
}

}  // namespace aeslab

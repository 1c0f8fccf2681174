#pragma once

// Shared small utilities: 128-bit value type used for register values and
// phase numerators, deterministic seed derivation, and integer helpers.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace oq {

// Register values and phase numerators. 128 bits so that double-width product
// registers (e.g. a 2n-bit product at n = 60) still fit exactly.
using uval = unsigned __int128;

constexpr uval uval_one = 1;

// Maximum supported dyadic precision (phase denominator 2^G). One bit of
// headroom is kept below the 128-bit value width.
constexpr uint32_t max_precision = 126;

inline uval pow2(uint32_t k) {
    if (k >= 128) throw std::invalid_argument("pow2: exponent out of range");
    return uval_one << k;
}

// Mask of the low k bits.
inline uval mask_bits(uint32_t k) {
    if (k >= 128) throw std::invalid_argument("mask_bits: width out of range");
    return (uval_one << k) - 1;
}

inline std::string to_string(uval v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
        v /= 10;
    }
    return std::string(s.rbegin(), s.rend());
}

inline uint64_t lo64(uval v) { return static_cast<uint64_t>(v); }

// SplitMix64: used to derive independent per-trial seeds from a master seed so
// trial results do not depend on evaluation order.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x51ed2701a8b6c04dull));
}

}  // namespace oq

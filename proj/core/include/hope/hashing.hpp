#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hope {

/// 64-bit FNV-1a. Used for mock-embedder token bucketing, cache keys,
/// config hashes, and per-document child seeds. Stable across platforms.
constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char byte : data) {
        hash ^= byte;
        hash *= 1099511628211ull;
    }
    return hash;
}

inline std::string to_hex(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

} // namespace hope

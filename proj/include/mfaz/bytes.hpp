#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mfaz {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// 32-byte SHA-256 output; the size of every GA and VP digest.
using Digest = std::array<std::uint8_t, 32>;

inline constexpr std::size_t kDigestSize = 32;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(ByteView b) {
    return std::string(b.begin(), b.end());
}

std::string hex_encode(ByteView data);
Bytes hex_decode(std::string_view hex);  // throws Error{RejectFormat} on bad input

inline std::uint32_t read_be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline std::uint64_t read_be64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
    return v;
}

inline void write_be32(Bytes& out, std::uint32_t v) {
    out.push_back(std::uint8_t(v >> 24));
    out.push_back(std::uint8_t(v >> 16));
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v));
}

inline void write_be64(Bytes& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8)
        out.push_back(std::uint8_t(v >> shift));
}

inline std::array<std::uint8_t, 8> be64_bytes(std::uint64_t v) {
    std::array<std::uint8_t, 8> a{};
    for (int i = 0; i < 8; ++i) a[i] = std::uint8_t(v >> (56 - 8 * i));
    return a;
}

}  // namespace mfaz

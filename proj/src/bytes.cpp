#include "mfaz/bytes.hpp"

#include "mfaz/errors.hpp"

namespace mfaz {

std::string hex_encode(ByteView data) {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
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

Bytes hex_decode(std::string_view hex) {
    if (hex.size() % 2 != 0)
        throw Error(ErrorCode::RejectFormat, "odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
            throw Error(ErrorCode::RejectFormat, "non-hex character");
        out.push_back(std::uint8_t((hi << 4) | lo));
    }
    return out;
}

}  // namespace mfaz

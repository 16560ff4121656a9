#pragma once

#include <cstddef>
#include <cstdint>

#include "mfaz/bytes.hpp"

namespace mfaz {

// Streaming SHA-256 (FIPS 180-4).
class Sha256 {
public:
    Sha256() { reset(); }

    void reset();
    void update(ByteView data);
    Digest finalize();

private:
    void compress(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint64_t total_len_;
    std::uint8_t buf_[64];
    std::size_t buf_len_;
};

Digest sha256(ByteView data);

}  // namespace mfaz

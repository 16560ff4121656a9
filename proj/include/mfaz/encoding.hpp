#pragma once

#include <cstdint>
#include <vector>

#include "mfaz/bytes.hpp"

namespace mfaz {

/// One field of the canonical tag-length-value encoding.
struct TlvField {
    std::uint8_t tag;
    Bytes payload;
};

/// Encodes an ordered field list as tag(1) ‖ length(u32 BE) ‖ payload per
/// field. Tags must be strictly ascending and payloads at most 2^32-1 bytes;
/// the result is injective over well-formed field lists.
/// Throws Error{RejectEncoding} on violation.
Bytes canonical_encode(const std::vector<TlvField>& fields);

/// Inverse of canonical_encode. Throws Error{RejectEncoding} if the input is
/// not an exact encoding (truncation, trailing bytes, non-ascending tags).
std::vector<TlvField> canonical_decode(ByteView data);

}  // namespace mfaz

#include "mfaz/encoding.hpp"

#include <limits>

#include "mfaz/errors.hpp"

namespace mfaz {

Bytes canonical_encode(const std::vector<TlvField>& fields) {
    Bytes out;
    int last_tag = -1;
    for (const TlvField& f : fields) {
        if (int(f.tag) <= last_tag)
            throw Error(ErrorCode::RejectEncoding, "tags not strictly ascending");
        if (f.payload.size() > std::numeric_limits<std::uint32_t>::max())
            throw Error(ErrorCode::RejectEncoding, "payload oversized");
        last_tag = f.tag;
        out.push_back(f.tag);
        write_be32(out, std::uint32_t(f.payload.size()));
        out.insert(out.end(), f.payload.begin(), f.payload.end());
    }
    return out;
}

std::vector<TlvField> canonical_decode(ByteView data) {
    std::vector<TlvField> fields;
    std::size_t pos = 0;
    int last_tag = -1;
    while (pos < data.size()) {
        if (data.size() - pos < 5)
            throw Error(ErrorCode::RejectEncoding, "truncated field header");
        std::uint8_t tag = data[pos];
        if (int(tag) <= last_tag)
            throw Error(ErrorCode::RejectEncoding, "tags not strictly ascending");
        std::uint32_t len = read_be32(data.data() + pos + 1);
        pos += 5;
        if (data.size() - pos < len)
            throw Error(ErrorCode::RejectEncoding, "truncated payload");
        fields.push_back({tag, Bytes(data.begin() + pos, data.begin() + pos + len)});
        pos += len;
        last_tag = tag;
    }
    return fields;
}

}  // namespace mfaz

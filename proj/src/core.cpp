#include "mfaz/core.hpp"

#include "mfaz/encoding.hpp"
#include "mfaz/errors.hpp"
#include "mfaz/sha256.hpp"

namespace mfaz {

const char* operation_name(Operation op) {
    switch (op) {
        case Operation::Read: return "read";
        case Operation::Write: return "write";
        case Operation::Execute: return "execute";
    }
    return "?";
}

const char* resource_class_name(ResourceClass rc) {
    switch (rc) {
        case ResourceClass::Private: return "private";
        case ResourceClass::Public: return "public";
    }
    return "?";
}

std::optional<Operation> operation_from_name(std::string_view name) {
    if (name == "read") return Operation::Read;
    if (name == "write") return Operation::Write;
    if (name == "execute") return Operation::Execute;
    return std::nullopt;
}

std::optional<ResourceClass> resource_class_from_name(std::string_view name) {
    if (name == "private") return ResourceClass::Private;
    if (name == "public") return ResourceClass::Public;
    return std::nullopt;
}

void validate_attrs(const UserAttr& user, const ResourceAttr& resource) {
    if (user.user_id.empty() || user.user_id.size() > kMaxAttrBytes)
        throw Error(ErrorCode::RejectEncoding, "user_id empty or oversized");
    if (resource.resource_id.empty() || resource.resource_id.size() > kMaxAttrBytes)
        throw Error(ErrorCode::RejectEncoding, "resource_id empty or oversized");
}

GrantedAccess gen_ga(const UserAttr& user, Operation op,
                     const ResourceAttr& resource, Timestamp ts) {
    validate_attrs(user, resource);
    const auto ts_be = be64_bytes(ts.millis);
    Bytes encoded = canonical_encode({
        {0x01, to_bytes(user.user_id)},
        {0x02, to_bytes(user.key_id)},
        {0x03, {std::uint8_t(op)}},
        {0x04, to_bytes(resource.resource_id)},
        {0x05, {std::uint8_t(resource.resource_class)}},
        {0x06, Bytes(ts_be.begin(), ts_be.end())},
    });
    return GrantedAccess{sha256(encoded), ts};
}

VerificationPoint gen_vp(const GrantedAccess& ga, const AuthKey& key) {
    Bytes encoded = canonical_encode({
        {0x01, Bytes(ga.digest.begin(), ga.digest.end())},
        {0x02, Bytes(key.key_bytes.begin(), key.key_bytes.end())},
    });
    return VerificationPoint{sha256(encoded)};
}

Digest make_key_proof(const AuthKey& key, ByteView nonce) {
    Bytes input(key.key_bytes.begin(), key.key_bytes.end());
    input.insert(input.end(), nonce.begin(), nonce.end());
    return sha256(input);
}

}  // namespace mfaz

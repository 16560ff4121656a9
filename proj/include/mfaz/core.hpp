#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include "mfaz/bytes.hpp"

namespace mfaz {

enum class Operation : std::uint8_t { Read = 0x01, Write = 0x02, Execute = 0x03 };

enum class ResourceClass : std::uint8_t { Private = 0x01, Public = 0x02 };

const char* operation_name(Operation op);
const char* resource_class_name(ResourceClass rc);
std::optional<Operation> operation_from_name(std::string_view name);
std::optional<ResourceClass> resource_class_from_name(std::string_view name);

/// Milliseconds since the Unix epoch; encoded as 8 bytes big-endian.
struct Timestamp {
    std::uint64_t millis = 0;
    auto operator<=>(const Timestamp&) const = default;
};

/// Long-term user secret held by the server after enrollment.
struct AuthKey {
    std::string key_id;
    std::array<std::uint8_t, 32> key_bytes{};
};

struct UserAttr {
    std::string user_id;
    std::string key_id;
    std::string role;  // optional, empty when absent
};

struct ResourceAttr {
    std::string resource_id;
    ResourceClass resource_class = ResourceClass::Private;
};

/// Client-held token recording one historical grant. The digest binds
/// (user, operation, resource, timestamp); issued_at is carried alongside
/// for vault bookkeeping only.
struct GrantedAccess {
    Digest digest{};
    Timestamp issued_at;
    auto operator<=>(const GrantedAccess&) const = default;
};

/// Server-verifiable form of a GrantedAccess, bound to the user's long-term
/// key. Only VPs enter the Bloom filter; VPs never travel to the client.
struct VerificationPoint {
    Digest digest{};
    auto operator<=>(const VerificationPoint&) const = default;
};

inline constexpr std::size_t kMaxAttrBytes = 256;

/// Throws Error{RejectEncoding} when an attribute violates its invariants
/// (empty user_id/resource_id, oversized strings).
void validate_attrs(const UserAttr& user, const ResourceAttr& resource);

/// Derives the granted-access digest:
/// SHA-256 over the canonical encoding of
/// (user_id, key_id, operation byte, resource_id, class byte, ts BE64).
/// Pure; key material never enters a GA.
GrantedAccess gen_ga(const UserAttr& user, Operation op,
                     const ResourceAttr& resource, Timestamp ts);

/// Derives the verification point: SHA-256 over the canonical encoding of
/// (ga digest, key bytes). Pure.
VerificationPoint gen_vp(const GrantedAccess& ga, const AuthKey& key);

/// Session-opening proof: SHA-256(key_bytes ‖ nonce). A minimal stand-in
/// for the out-of-scope authentication exchange.
Digest make_key_proof(const AuthKey& key, ByteView nonce);

}  // namespace mfaz

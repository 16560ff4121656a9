#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfaz/bytes.hpp"
#include "mfaz/core.hpp"
#include "mfaz/server.hpp"

namespace mfaz {

inline constexpr std::uint32_t kProtocolVersion = 1;
inline constexpr std::size_t kMaxBodySize = 64 * 1024;

enum class MsgType : std::uint8_t {
    Enroll = 1,
    OpenSession = 2,
    AccessRequest = 3,
    Decision = 4,
    Error = 5,
};

struct WireMessage {
    MsgType type = MsgType::Error;
    std::uint32_t version = kProtocolVersion;
    Bytes body;

    bool operator==(const WireMessage&) const = default;
};

/// Frame layout: u32 BE length ‖ msg_type u8 ‖ version u32 BE ‖ body, where
/// length counts everything after itself (5 + body size). Body is capped at
/// 64 KiB. decode(encode(m)) == m.
Bytes encode_frame(const WireMessage& message);

/// Expects one complete frame. Throws Error{RejectFrame} on length, type or
/// version violations — before any body parsing.
WireMessage decode_frame(ByteView frame);

// ---- message bodies -------------------------------------------------------
// Requests reuse the ENROLL / OPEN_SESSION / ACCESS_REQUEST types; responses
// arrive as ENROLL, OPEN_SESSION, DECISION or ERROR. Opening a session takes
// two rounds on one connection: an empty key_proof asks for a challenge
// nonce, the follow-up carries the proof and yields the sid.

struct EnrollRequestMsg {
    UserAttr user;
    AuthKey key;
    std::uint32_t bootstrap_count = 0;  // 0: server default
};

struct EnrollResponseMsg {
    std::vector<GrantedAccess> gas;
};

struct SessionRequestMsg {
    std::string user_id;
    Bytes key_proof;  // empty: challenge request
};

struct SessionResponseMsg {
    Bytes nonce;                       // set on the challenge round
    std::optional<SessionId> session;  // set once the proof verifies
};

struct ErrorMsg {
    std::string code;
    std::string message;
};

Bytes encode_enroll_request(const EnrollRequestMsg& m);
EnrollRequestMsg decode_enroll_request(ByteView body);

Bytes encode_enroll_response(const EnrollResponseMsg& m);
EnrollResponseMsg decode_enroll_response(ByteView body);

Bytes encode_session_request(const SessionRequestMsg& m);
SessionRequestMsg decode_session_request(ByteView body);

Bytes encode_session_response(const SessionResponseMsg& m);
SessionResponseMsg decode_session_response(ByteView body);

Bytes encode_access_request(const AccessRequest& m);
AccessRequest decode_access_request(ByteView body);

Bytes encode_decision(const AccessDecision& m);
AccessDecision decode_decision(ByteView body);

Bytes encode_error(const ErrorMsg& m);
ErrorMsg decode_error(ByteView body);

}  // namespace mfaz

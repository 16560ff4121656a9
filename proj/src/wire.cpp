#include "mfaz/wire.hpp"

#include <cstring>

#include "mfaz/encoding.hpp"
#include "mfaz/errors.hpp"

namespace mfaz {

namespace {

bool valid_msg_type(std::uint8_t t) {
    return t >= std::uint8_t(MsgType::Enroll) && t <= std::uint8_t(MsgType::Error);
}

// Field lookup over a decoded body; mandatory fields throw RejectFormat.
const Bytes& need(const std::vector<TlvField>& fields, std::uint8_t tag) {
    for (const TlvField& f : fields)
        if (f.tag == tag) return f.payload;
    throw Error(ErrorCode::RejectFormat,
                "missing field " + std::to_string(int(tag)));
}

const Bytes& need_sized(const std::vector<TlvField>& fields, std::uint8_t tag,
                        std::size_t size) {
    const Bytes& p = need(fields, tag);
    if (p.size() != size)
        throw Error(ErrorCode::RejectFormat,
                    "field " + std::to_string(int(tag)) + " has wrong size");
    return p;
}

std::vector<TlvField> decode_body(ByteView body) {
    try {
        return canonical_decode(body);
    } catch (const Error&) {
        throw Error(ErrorCode::RejectFormat, "malformed message body");
    }
}

Bytes ga_list_encode(const std::vector<GrantedAccess>& gas) {
    Bytes out;
    write_be32(out, std::uint32_t(gas.size()));
    for (const GrantedAccess& ga : gas) {
        out.insert(out.end(), ga.digest.begin(), ga.digest.end());
        write_be64(out, ga.issued_at.millis);
    }
    return out;
}

std::vector<GrantedAccess> ga_list_decode(const Bytes& blob) {
    if (blob.size() < 4)
        throw Error(ErrorCode::RejectFormat, "truncated ga list");
    std::uint32_t count = read_be32(blob.data());
    if (blob.size() != 4 + std::size_t(count) * 40)
        throw Error(ErrorCode::RejectFormat, "ga list length mismatch");
    std::vector<GrantedAccess> gas(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint8_t* p = blob.data() + 4 + std::size_t(i) * 40;
        std::memcpy(gas[i].digest.data(), p, 32);
        gas[i].issued_at = Timestamp{read_be64(p + 32)};
    }
    return gas;
}

}  // namespace

Bytes encode_frame(const WireMessage& message) {
    if (message.body.size() > kMaxBodySize)
        throw Error(ErrorCode::RejectFrame, "body exceeds 64 KiB");
    if (!valid_msg_type(std::uint8_t(message.type)))
        throw Error(ErrorCode::RejectFrame, "unknown msg type");
    Bytes out;
    write_be32(out, std::uint32_t(5 + message.body.size()));
    out.push_back(std::uint8_t(message.type));
    write_be32(out, message.version);
    out.insert(out.end(), message.body.begin(), message.body.end());
    return out;
}

WireMessage decode_frame(ByteView frame) {
    if (frame.size() < 9)
        throw Error(ErrorCode::RejectFrame, "frame shorter than header");
    std::uint32_t length = read_be32(frame.data());
    if (length < 5 || length > 5 + kMaxBodySize)
        throw Error(ErrorCode::RejectFrame, "frame length out of range");
    if (frame.size() != 4 + std::size_t(length))
        throw Error(ErrorCode::RejectFrame, "frame length mismatch");
    std::uint8_t type = frame[4];
    if (!valid_msg_type(type))
        throw Error(ErrorCode::RejectFrame, "unknown msg type");
    std::uint32_t version = read_be32(frame.data() + 5);
    if (version != kProtocolVersion)
        throw Error(ErrorCode::RejectFrame, "protocol version mismatch");

    WireMessage m;
    m.type = MsgType(type);
    m.version = version;
    m.body.assign(frame.begin() + 9, frame.end());
    return m;
}

Bytes encode_enroll_request(const EnrollRequestMsg& m) {
    const auto count_be = be64_bytes(m.bootstrap_count);
    return canonical_encode({
        {0x01, to_bytes(m.user.user_id)},
        {0x02, to_bytes(m.user.key_id)},
        {0x03, to_bytes(m.user.role)},
        {0x04, Bytes(m.key.key_bytes.begin(), m.key.key_bytes.end())},
        {0x05, Bytes(count_be.begin() + 4, count_be.end())},
    });
}

EnrollRequestMsg decode_enroll_request(ByteView body) {
    auto fields = decode_body(body);
    EnrollRequestMsg m;
    m.user.user_id = to_string(need(fields, 0x01));
    m.user.key_id = to_string(need(fields, 0x02));
    m.user.role = to_string(need(fields, 0x03));
    const Bytes& kb = need_sized(fields, 0x04, 32);
    std::memcpy(m.key.key_bytes.data(), kb.data(), 32);
    m.key.key_id = m.user.key_id;
    m.bootstrap_count = read_be32(need_sized(fields, 0x05, 4).data());
    return m;
}

Bytes encode_enroll_response(const EnrollResponseMsg& m) {
    return canonical_encode({{0x01, ga_list_encode(m.gas)}});
}

EnrollResponseMsg decode_enroll_response(ByteView body) {
    auto fields = decode_body(body);
    return EnrollResponseMsg{ga_list_decode(need(fields, 0x01))};
}

Bytes encode_session_request(const SessionRequestMsg& m) {
    return canonical_encode({
        {0x01, to_bytes(m.user_id)},
        {0x02, m.key_proof},
    });
}

SessionRequestMsg decode_session_request(ByteView body) {
    auto fields = decode_body(body);
    SessionRequestMsg m;
    m.user_id = to_string(need(fields, 0x01));
    m.key_proof = need(fields, 0x02);
    return m;
}

Bytes encode_session_response(const SessionResponseMsg& m) {
    Bytes sid;
    std::uint64_t expires = 0;
    std::string user_id;
    if (m.session) {
        sid.assign(m.session->sid.begin(), m.session->sid.end());
        expires = m.session->expires_at.millis;
        user_id = m.session->user_id;
    }
    const auto expires_be = be64_bytes(expires);
    return canonical_encode({
        {0x01, m.nonce},
        {0x02, sid},
        {0x03, to_bytes(user_id)},
        {0x04, Bytes(expires_be.begin(), expires_be.end())},
    });
}

SessionResponseMsg decode_session_response(ByteView body) {
    auto fields = decode_body(body);
    SessionResponseMsg m;
    m.nonce = need(fields, 0x01);
    const Bytes& sid = need(fields, 0x02);
    if (!sid.empty()) {
        if (sid.size() != 16)
            throw Error(ErrorCode::RejectFormat, "sid has wrong size");
        SessionId session;
        std::memcpy(session.sid.data(), sid.data(), 16);
        session.user_id = to_string(need(fields, 0x03));
        session.expires_at = Timestamp{read_be64(need_sized(fields, 0x04, 8).data())};
        m.session = session;
    }
    return m;
}

Bytes encode_access_request(const AccessRequest& m) {
    Bytes sga_blob;
    write_be32(sga_blob, std::uint32_t(m.sga.size()));
    for (const Digest& d : m.sga) sga_blob.insert(sga_blob.end(), d.begin(), d.end());

    return canonical_encode({
        {0x01, to_bytes(m.user.user_id)},
        {0x02, to_bytes(m.user.key_id)},
        {0x03, to_bytes(m.user.role)},
        {0x04, Bytes(m.sid.begin(), m.sid.end())},
        {0x05, {std::uint8_t(m.op)}},
        {0x06, to_bytes(m.resource.resource_id)},
        {0x07, {std::uint8_t(m.resource.resource_class)}},
        {0x08, std::move(sga_blob)},
    });
}

AccessRequest decode_access_request(ByteView body) {
    auto fields = decode_body(body);
    AccessRequest m;
    m.user.user_id = to_string(need(fields, 0x01));
    m.user.key_id = to_string(need(fields, 0x02));
    m.user.role = to_string(need(fields, 0x03));
    const Bytes& sid = need_sized(fields, 0x04, 16);
    std::memcpy(m.sid.data(), sid.data(), 16);

    std::uint8_t op = need_sized(fields, 0x05, 1)[0];
    if (op < 1 || op > 3)
        throw Error(ErrorCode::RejectFormat, "bad operation byte");
    m.op = Operation(op);

    m.resource.resource_id = to_string(need(fields, 0x06));
    std::uint8_t rc = need_sized(fields, 0x07, 1)[0];
    if (rc < 1 || rc > 2)
        throw Error(ErrorCode::RejectFormat, "bad resource class byte");
    m.resource.resource_class = ResourceClass(rc);

    const Bytes& blob = need(fields, 0x08);
    if (blob.size() < 4)
        throw Error(ErrorCode::RejectFormat, "truncated sga list");
    std::uint32_t count = read_be32(blob.data());
    if (blob.size() != 4 + std::size_t(count) * 32)
        throw Error(ErrorCode::RejectFormat, "sga list length mismatch");
    m.sga.resize(count);
    for (std::uint32_t i = 0; i < count; ++i)
        std::memcpy(m.sga[i].data(), blob.data() + 4 + std::size_t(i) * 32, 32);
    return m;
}

Bytes encode_decision(const AccessDecision& m) {
    Bytes ts;
    if (m.new_ga_ts) {
        const auto ts_be = be64_bytes(m.new_ga_ts->millis);
        ts.assign(ts_be.begin(), ts_be.end());
    }
    return canonical_encode({
        {0x01, {std::uint8_t(m.verdict)}},
        {0x02, {std::uint8_t(m.reason)}},
        {0x03, std::move(ts)},
    });
}

AccessDecision decode_decision(ByteView body) {
    auto fields = decode_body(body);
    AccessDecision m;
    std::uint8_t v = need_sized(fields, 0x01, 1)[0];
    if (v < 1 || v > 2)
        throw Error(ErrorCode::RejectFormat, "bad verdict byte");
    m.verdict = Verdict(v);
    std::uint8_t r = need_sized(fields, 0x02, 1)[0];
    if (r < 1 || r > 4)
        throw Error(ErrorCode::RejectFormat, "bad reason byte");
    m.reason = Reason(r);
    const Bytes& ts = need(fields, 0x03);
    if (!ts.empty()) {
        if (ts.size() != 8)
            throw Error(ErrorCode::RejectFormat, "bad timestamp size");
        m.new_ga_ts = Timestamp{read_be64(ts.data())};
    }
    return m;
}

Bytes encode_error(const ErrorMsg& m) {
    return canonical_encode({
        {0x01, to_bytes(m.code)},
        {0x02, to_bytes(m.message)},
    });
}

ErrorMsg decode_error(ByteView body) {
    auto fields = decode_body(body);
    return ErrorMsg{to_string(need(fields, 0x01)), to_string(need(fields, 0x02))};
}

}  // namespace mfaz

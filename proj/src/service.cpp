#include "mfaz/service.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <ostream>

#include "mfaz/errors.hpp"
#include "mfaz/time.hpp"

namespace mfaz {

namespace {

bool read_exact(int fd, std::uint8_t* buf, std::size_t len) {
    std::size_t done = 0;
    while (done < len) {
        ssize_t n = ::read(fd, buf + done, len - done);
        if (n <= 0) return false;
        done += std::size_t(n);
    }
    return true;
}

bool write_all(int fd, ByteView data) {
    std::size_t done = 0;
    while (done < data.size()) {
        ssize_t n = ::write(fd, data.data() + done, data.size() - done);
        if (n <= 0) return false;
        done += std::size_t(n);
    }
    return true;
}

Bytes error_frame(const std::string& code, const std::string& message) {
    // Error text is clamped so a response frame always encodes.
    std::string clamped = message.substr(0, 512);
    return encode_frame(
        {MsgType::Error, kProtocolVersion, encode_error({code, clamped})});
}

}  // namespace

WireService::WireService(AuthzServer& server, std::uint16_t port,
                         std::ostream* decision_log)
    : server_(server), port_(port), decision_log_(decision_log) {}

WireService::~WireService() { stop(); }

void WireService::start() {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw Error(ErrorCode::Transport, "socket() failed");

    int yes = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port_);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        ::close(fd);
        throw Error(ErrorCode::Transport,
                    "bind failed on port " + std::to_string(port_));
    }
    if (::listen(fd, 64) < 0) {
        ::close(fd);
        throw Error(ErrorCode::Transport, "listen failed");
    }

    socklen_t len = sizeof(addr);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);

    listen_fd_.store(fd);
    running_ = true;
    accept_thread_ = std::thread([this] { accept_loop(); });
}

void WireService::stop() {
    if (!running_.exchange(false)) return;
    // shutdown unblocks accept(); close only after the acceptor is gone
    int fd = listen_fd_.load();
    if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
    if (accept_thread_.joinable()) accept_thread_.join();
    if (fd >= 0) {
        ::close(fd);
        listen_fd_.store(-1);
    }
    {
        std::lock_guard lock(conn_mutex_);
        for (int conn : conn_fds_) ::shutdown(conn, SHUT_RDWR);
    }
    while (active_connections_.load() > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
}

void WireService::accept_loop() {
    while (running_) {
        int fd = ::accept(listen_fd_.load(), nullptr, nullptr);
        if (fd < 0) {
            if (!running_) break;
            continue;
        }
        {
            std::lock_guard lock(conn_mutex_);
            conn_fds_.insert(fd);
        }
        ++active_connections_;
        std::thread([this, fd] {
            serve_connection(fd);
            {
                std::lock_guard lock(conn_mutex_);
                conn_fds_.erase(fd);
            }
            ::close(fd);
            --active_connections_;
        }).detach();
    }
}

void WireService::serve_connection(int fd) {
    for (;;) {
        std::uint8_t len_buf[4];
        if (!read_exact(fd, len_buf, 4)) return;
        std::uint32_t length = read_be32(len_buf);
        if (length < 5 || length > 5 + kMaxBodySize) {
            // Cannot trust the claimed length; report and keep reading from
            // the current stream position.
            if (!write_all(fd, error_frame("REJECT_FRAME", "bad frame length")))
                return;
            continue;
        }
        Bytes frame(4 + length);
        std::memcpy(frame.data(), len_buf, 4);
        if (!read_exact(fd, frame.data() + 4, length)) return;

        Bytes response = handle_frame(frame);
        if (!write_all(fd, response)) return;
    }
}

Bytes WireService::handle_frame(ByteView frame) {
    WireMessage request;
    try {
        request = decode_frame(frame);
    } catch (const Error& e) {
        return error_frame(error_code_name(e.code()), e.message());
    }

    try {
        switch (request.type) {
            case MsgType::Enroll: {
                EnrollRequestMsg msg = decode_enroll_request(request.body);
                auto result = server_.enroll(
                    msg.user, msg.key,
                    msg.bootstrap_count == 0
                        ? std::nullopt
                        : std::optional<std::uint32_t>(msg.bootstrap_count));
                return encode_frame({MsgType::Enroll, kProtocolVersion,
                                     encode_enroll_response({result.bootstrap_gas})});
            }
            case MsgType::OpenSession: {
                SessionRequestMsg msg = decode_session_request(request.body);
                SessionResponseMsg response;
                if (msg.key_proof.empty()) {
                    response.nonce = server_.issue_nonce(msg.user_id);
                } else {
                    response.session =
                        server_.open_session(msg.user_id, msg.key_proof);
                }
                return encode_frame({MsgType::OpenSession, kProtocolVersion,
                                     encode_session_response(response)});
            }
            case MsgType::AccessRequest: {
                AccessRequest msg = decode_access_request(request.body);
                AccessDecision decision = server_.authorize(msg);
                log_decision(msg, decision);
                return encode_frame({MsgType::Decision, kProtocolVersion,
                                     encode_decision(decision)});
            }
            case MsgType::Decision:
            case MsgType::Error:
                return error_frame("REJECT_FRAME", "response type sent as request");
        }
        return error_frame("REJECT_FRAME", "unhandled msg type");
    } catch (const Error& e) {
        return error_frame(error_code_name(e.code()), e.message());
    } catch (const std::exception& e) {
        return error_frame("INTERNAL", e.what());
    }
}

void WireService::log_decision(const AccessRequest& request,
                               const AccessDecision& decision) {
    if (!decision_log_) return;
    std::lock_guard lock(log_mutex_);
    (*decision_log_) << "decision ts=" << system_now().millis
                     << " user=" << request.user.user_id
                     << " op=" << operation_name(request.op)
                     << " resource=" << request.resource.resource_id
                     << " verdict=" << verdict_name(decision.verdict)
                     << " reason=" << reason_name(decision.reason) << "\n";
}

// ---- client transport ------------------------------------------------------

WireChannel::WireChannel(const std::string& host, std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw Error(ErrorCode::Transport, "socket() failed");

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw Error(ErrorCode::Transport, "bad host address: " + host);
    }
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        ::close(fd_);
        throw Error(ErrorCode::Transport,
                    "connect failed to " + host + ":" + std::to_string(port));
    }
    int yes = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof(yes));
}

WireChannel::~WireChannel() {
    if (fd_ >= 0) ::close(fd_);
}

WireMessage WireChannel::round_trip(const WireMessage& request) {
    std::lock_guard lock(mutex_);
    if (!write_all(fd_, encode_frame(request)))
        throw Error(ErrorCode::Transport, "send failed");

    std::uint8_t len_buf[4];
    if (!read_exact(fd_, len_buf, 4))
        throw Error(ErrorCode::Transport, "connection closed");
    std::uint32_t length = read_be32(len_buf);
    if (length < 5 || length > 5 + kMaxBodySize)
        throw Error(ErrorCode::RejectFrame, "bad response length");
    Bytes frame(4 + length);
    std::memcpy(frame.data(), len_buf, 4);
    if (!read_exact(fd_, frame.data() + 4, length))
        throw Error(ErrorCode::Transport, "connection closed mid-frame");

    WireMessage response = decode_frame(frame);
    if (response.type == MsgType::Error) {
        ErrorMsg err = decode_error(response.body);
        for (int c = 0; c <= int(ErrorCode::Transport); ++c) {
            if (err.code == error_code_name(ErrorCode(c)))
                throw Error(ErrorCode(c), err.message);
        }
        throw Error(ErrorCode::Transport, err.code + ": " + err.message);
    }
    return response;
}

std::vector<GrantedAccess> WireChannel::enroll(const UserAttr& user,
                                               const AuthKey& key,
                                               std::uint32_t bootstrap_count) {
    WireMessage response = round_trip(
        {MsgType::Enroll, kProtocolVersion,
         encode_enroll_request({user, key, bootstrap_count})});
    if (response.type != MsgType::Enroll)
        throw Error(ErrorCode::Transport, "unexpected response type");
    return decode_enroll_response(response.body).gas;
}

Bytes WireChannel::session_challenge(const std::string& user_id) {
    WireMessage response =
        round_trip({MsgType::OpenSession, kProtocolVersion,
                    encode_session_request({user_id, {}})});
    if (response.type != MsgType::OpenSession)
        throw Error(ErrorCode::Transport, "unexpected response type");
    SessionResponseMsg msg = decode_session_response(response.body);
    if (msg.nonce.empty())
        throw Error(ErrorCode::Transport, "challenge carried no nonce");
    return msg.nonce;
}

SessionId WireChannel::session_open(const std::string& user_id,
                                    ByteView key_proof) {
    WireMessage response = round_trip(
        {MsgType::OpenSession, kProtocolVersion,
         encode_session_request({user_id, Bytes(key_proof.begin(), key_proof.end())})});
    if (response.type != MsgType::OpenSession)
        throw Error(ErrorCode::Transport, "unexpected response type");
    SessionResponseMsg msg = decode_session_response(response.body);
    if (!msg.session)
        throw Error(ErrorCode::AuthFail, "no session granted");
    return *msg.session;
}

AccessDecision WireChannel::authorize(const AccessRequest& request) {
    WireMessage response = round_trip({MsgType::AccessRequest, kProtocolVersion,
                                       encode_access_request(request)});
    if (response.type != MsgType::Decision)
        throw Error(ErrorCode::Transport, "unexpected response type");
    return decode_decision(response.body);
}

}  // namespace mfaz

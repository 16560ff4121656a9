#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <set>
#include <string>
#include <thread>

#include "mfaz/client.hpp"
#include "mfaz/server.hpp"
#include "mfaz/wire.hpp"

namespace mfaz {

/// Framed request/response transport over a local TCP stream socket, one
/// response per request, one thread per connection. Transport security is a
/// deployment concern (TLS termination in front); frames are plaintext.
class WireService {
public:
    /// port 0 binds an ephemeral port; see port() after start().
    WireService(AuthzServer& server, std::uint16_t port,
                std::ostream* decision_log = nullptr);
    ~WireService();

    void start();  // throws Error{Transport} on bind/listen failure
    void stop();
    std::uint16_t port() const { return port_; }

    /// One frame in, one frame out. Any malformed input or handler failure
    /// yields an encoded ERROR frame; never throws, never crashes.
    Bytes handle_frame(ByteView frame);

private:
    void accept_loop();
    void serve_connection(int fd);
    void log_decision(const AccessRequest& request, const AccessDecision& decision);

    AuthzServer& server_;
    std::uint16_t port_;
    std::ostream* decision_log_;

    std::atomic<int> listen_fd_{-1};
    std::thread accept_thread_;
    std::atomic<bool> running_{false};
    std::atomic<int> active_connections_{0};
    std::mutex conn_mutex_;
    std::set<int> conn_fds_;
    std::mutex log_mutex_;
};

/// Client-side transport: one connection, sequential request/response.
/// Server-reported ERROR frames surface as Error with the original code.
class WireChannel : public AuthzChannel {
public:
    WireChannel(const std::string& host, std::uint16_t port);
    ~WireChannel();

    std::vector<GrantedAccess> enroll(const UserAttr& user, const AuthKey& key,
                                      std::uint32_t bootstrap_count) override;
    Bytes session_challenge(const std::string& user_id) override;
    SessionId session_open(const std::string& user_id, ByteView key_proof) override;
    AccessDecision authorize(const AccessRequest& request) override;

private:
    WireMessage round_trip(const WireMessage& request);

    std::mutex mutex_;
    int fd_ = -1;
};

}  // namespace mfaz

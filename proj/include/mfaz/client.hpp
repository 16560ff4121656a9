#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfaz/core.hpp"
#include "mfaz/server.hpp"
#include "mfaz/vault.hpp"

namespace mfaz {

/// Transport-agnostic view of the authorization service, implemented
/// in-process (tests, bench) and over the wire protocol (CLIs).
class AuthzChannel {
public:
    virtual ~AuthzChannel() = default;

    /// bootstrap_count 0 means the server default.
    virtual std::vector<GrantedAccess> enroll(const UserAttr& user,
                                              const AuthKey& key,
                                              std::uint32_t bootstrap_count) = 0;
    virtual Bytes session_challenge(const std::string& user_id) = 0;
    virtual SessionId session_open(const std::string& user_id,
                                   ByteView key_proof) = 0;
    virtual AccessDecision authorize(const AccessRequest& request) = 0;
};

class InProcessChannel : public AuthzChannel {
public:
    explicit InProcessChannel(AuthzServer& server) : server_(server) {}

    std::vector<GrantedAccess> enroll(const UserAttr& user, const AuthKey& key,
                                      std::uint32_t bootstrap_count) override;
    Bytes session_challenge(const std::string& user_id) override;
    SessionId session_open(const std::string& user_id, ByteView key_proof) override;
    AccessDecision authorize(const AccessRequest& request) override;

private:
    AuthzServer& server_;
};

/// Client side of the scheme: holds the key, drives the vault, and keeps the
/// locally regenerated GA in sync with the server after each grant.
class ClientAgent {
public:
    ClientAgent(UserAttr user, AuthKey key, GaVault& vault, AuthzChannel& channel)
        : user_(std::move(user)), key_(std::move(key)), vault_(vault),
          channel_(channel) {}

    /// Enrolls and stores the returned bootstrap GAs in the vault.
    std::vector<GrantedAccess> enroll(std::uint32_t bootstrap_count = 0);

    /// Challenge-response session opening; remembers the sid.
    SessionId open_session();
    void adopt_session(const SessionId& session) { session_ = session; }
    const std::optional<SessionId>& session() const { return session_; }

    /// Selects q random GAs, sends the request, and on a grant consumes the
    /// presented GAs and stores the locally regenerated new one. A denial
    /// leaves the vault untouched. Throws Error{VaultEmpty} when the vault
    /// cannot supply q entries.
    AccessDecision request_access(Operation op, const ResourceAttr& resource,
                                  std::size_t q = 1,
                                  std::optional<std::uint64_t> seed = std::nullopt);

    const UserAttr& user() const { return user_; }
    GaVault& vault() { return vault_; }

private:
    UserAttr user_;
    AuthKey key_;
    GaVault& vault_;
    AuthzChannel& channel_;
    std::optional<SessionId> session_;
};

}  // namespace mfaz

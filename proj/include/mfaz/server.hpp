#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mfaz/bloom_filter.hpp"
#include "mfaz/bytes.hpp"
#include "mfaz/core.hpp"
#include "mfaz/ledger.hpp"
#include "mfaz/policy.hpp"
#include "mfaz/time.hpp"

namespace mfaz {

struct ServerConfig {
    std::uint64_t bf_capacity = 1000;
    double bf_fpr = 0.01;
    std::uint64_t session_ttl_secs = 900;
    std::uint32_t bootstrap_count = 3;
    std::uint32_t sga_max = 3;
};

using Sid = std::array<std::uint8_t, 16>;

struct SessionId {
    Sid sid{};
    std::string user_id;
    Timestamp expires_at;
};

struct UserRecord {
    UserAttr user;
    AuthKey key;
    Timestamp enrolled_at;
    std::set<Sid> active_sessions;
};

struct AccessRequest {
    UserAttr user;
    Sid sid{};
    Operation op = Operation::Read;
    ResourceAttr resource;
    std::vector<Digest> sga;  // presented granted-access digests, 1..sga_max
};

enum class Verdict : std::uint8_t { Granted = 1, Denied = 2 };
enum class Reason : std::uint8_t {
    Ok = 1,
    ArFail = 2,
    VpFail = 3,
    SessionInvalid = 4,
};

const char* verdict_name(Verdict v);
const char* reason_name(Reason r);

struct AccessDecision {
    Verdict verdict = Verdict::Denied;
    Reason reason = Reason::SessionInvalid;
    /// Present iff Granted: the server-authoritative timestamp the client
    /// uses to regenerate the identical new GA locally.
    std::optional<Timestamp> new_ga_ts;
};

struct EnrollResult {
    UserRecord record;
    std::vector<GrantedAccess> bootstrap_gas;  // delivered to the client vault
};

enum class RevokeResult { Ok, NotFound };

/// Two-factor authorization server. Factor one is the attribute-rule check
/// against the latest ledger-stored ruleset; factor two verifies every
/// presented GA's verification point against the latest ledger-stored Bloom
/// filter. All Bloom filter mutations go through the ledger's
/// compare-and-append, so concurrent grants serialize via Conflict retries.
/// Fails closed: a ledger failure surfaces as an error, never as a grant.
class AuthzServer {
public:
    AuthzServer(Ledger& ledger, ServerConfig config = {},
                ClockFn clock = system_now);

    /// Registers the user, mints bootstrap_count dummy GAs
    /// (read, ("__bootstrap__", public), consecutive timestamps), inserts
    /// their VPs into the filter and appends the filter to the ledger.
    /// Throws Error{AlreadyEnrolled}, Error{RejectParams}; Error{Conflict}
    /// after exhausting 3 internal retries.
    EnrollResult enroll(const UserAttr& user, const AuthKey& key,
                        std::optional<std::uint32_t> bootstrap_count = std::nullopt);

    /// One-shot 32-byte challenge consumed by the next open_session attempt.
    Bytes issue_nonce(const std::string& user_id);

    /// key_proof must equal SHA-256(key_bytes ‖ nonce). Throws
    /// Error{UnknownUser} or Error{AuthFail}.
    SessionId open_session(const std::string& user_id, ByteView key_proof);

    RevokeResult revoke_session(const Sid& sid);

    /// Decision pipeline: session validity, then sat_ar, then VP presence
    /// for every presented GA; on success issues the next GA/VP pair and
    /// appends the updated filter. Throws Error{LedgerUnavailable} when the
    /// append cannot land after 3 retries; ledger fetch failures propagate.
    AccessDecision authorize(const AccessRequest& request);

    /// Latest ledger-stored filter, if any. Mainly for tests and reporting.
    std::optional<BloomFilter> latest_bf() const;

    const ServerConfig& config() const { return config_; }
    bool is_enrolled(const std::string& user_id) const;

private:
    struct BfState {
        std::uint64_t expected_prev_seq = 0;
        std::optional<BloomFilter> filter;
    };

    BfState fetch_bf_state() const;
    Timestamp reserve_ts_block(std::uint64_t count);

    Ledger& ledger_;
    ServerConfig config_;
    ClockFn clock_;

    mutable std::mutex mutex_;
    // Serializes this process's filter read-modify-write cycles so
    // concurrent grants don't burn the conflict-retry budget against each
    // other; the ledger token still guards against external writers.
    std::mutex bf_write_mutex_;
    std::map<std::string, UserRecord> records_;
    std::set<std::string> enrolling_;  // in-flight enrollments
    std::map<Sid, SessionId> sessions_;
    std::map<std::string, Bytes> pending_nonces_;
    std::uint64_t last_issued_ms_ = 0;
};

/// Fills out with cryptographically strong randomness (getentropy).
void fill_random(std::span<std::uint8_t> out);

}  // namespace mfaz

#include "mfaz/server.hpp"

#include <sys/random.h>

#include "mfaz/errors.hpp"
#include "mfaz/sha256.hpp"

namespace mfaz {

const char* verdict_name(Verdict v) {
    return v == Verdict::Granted ? "GRANTED" : "DENIED";
}

const char* reason_name(Reason r) {
    switch (r) {
        case Reason::Ok: return "OK";
        case Reason::ArFail: return "AR_FAIL";
        case Reason::VpFail: return "VP_FAIL";
        case Reason::SessionInvalid: return "SESSION_INVALID";
    }
    return "?";
}

void fill_random(std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
        ssize_t n = ::getrandom(out.data() + done, out.size() - done, 0);
        if (n <= 0)
            throw Error(ErrorCode::RejectState, "randomness source unavailable");
        done += std::size_t(n);
    }
}

namespace {

constexpr int kLedgerRetries = 3;

const ResourceAttr kBootstrapResource{"__bootstrap__", ResourceClass::Public};

bool equal_ct(ByteView a, ByteView b) {
    if (a.size() != b.size()) return false;
    std::uint8_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc |= a[i] ^ b[i];
    return acc == 0;
}

}  // namespace

AuthzServer::AuthzServer(Ledger& ledger, ServerConfig config, ClockFn clock)
    : ledger_(ledger), config_(config), clock_(std::move(clock)) {}

AuthzServer::BfState AuthzServer::fetch_bf_state() const {
    // head must be read before latest(): an append landing in between makes
    // latest's seq exceed head and we re-read, so a grant never bases its
    // read-modify-write on a filter newer than its concurrency token.
    for (;;) {
        std::uint64_t head = ledger_.head_seq();
        auto event = ledger_.latest(kTopicBfUpdate);
        if (!event) return {head, std::nullopt};
        if (event->seq <= head)
            return {head, BloomFilter::deserialize(event->payload)};
    }
}

Timestamp AuthzServer::reserve_ts_block(std::uint64_t count) {
    std::lock_guard lock(mutex_);
    std::uint64_t t0 = std::max(clock_().millis, last_issued_ms_ + 1);
    last_issued_ms_ = t0 + count - 1;
    return Timestamp{t0};
}

bool AuthzServer::is_enrolled(const std::string& user_id) const {
    std::lock_guard lock(mutex_);
    return records_.count(user_id) > 0;
}

EnrollResult AuthzServer::enroll(const UserAttr& user, const AuthKey& key,
                                 std::optional<std::uint32_t> bootstrap_count) {
    std::uint32_t count = bootstrap_count.value_or(config_.bootstrap_count);
    if (count < 1)
        throw Error(ErrorCode::RejectParams, "bootstrap count must be >= 1");
    if (user.user_id.empty() || user.user_id.size() > kMaxAttrBytes)
        throw Error(ErrorCode::RejectParams, "user_id empty or oversized");
    if (user.key_id != key.key_id)
        throw Error(ErrorCode::RejectParams, "user/key key_id mismatch");

    {
        std::lock_guard lock(mutex_);
        if (records_.count(user.user_id) || enrolling_.count(user.user_id))
            throw Error(ErrorCode::AlreadyEnrolled, user.user_id);
        for (const auto& [id, record] : records_) {
            if (record.key.key_id == key.key_id)
                throw Error(ErrorCode::RejectParams,
                            "key_id already in use: " + key.key_id);
        }
        enrolling_.insert(user.user_id);  // reserve against a concurrent enroll
    }

    try {
        Timestamp t0 = reserve_ts_block(count);
        std::vector<GrantedAccess> gas;
        std::vector<VerificationPoint> vps;
        gas.reserve(count);
        vps.reserve(count);
        for (std::uint32_t j = 0; j < count; ++j) {
            GrantedAccess ga = gen_ga(user, Operation::Read, kBootstrapResource,
                                      Timestamp{t0.millis + j});
            vps.push_back(gen_vp(ga, key));
            gas.push_back(ga);
        }

        {
            std::lock_guard write_lock(bf_write_mutex_);
            for (int attempt = 0;; ++attempt) {
                BfState state = fetch_bf_state();
                BloomFilter bf =
                    state.filter
                        ? std::move(*state.filter)
                        : BloomFilter::make(config_.bf_capacity, config_.bf_fpr);
                for (const VerificationPoint& vp : vps) bf.insert(vp);
                try {
                    ledger_.append(kTopicBfUpdate, bf.serialize(),
                                   state.expected_prev_seq);
                    break;
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::Conflict ||
                        attempt >= kLedgerRetries)
                        throw;
                }
            }
        }

        UserRecord record;
        record.user = user;
        record.key = key;
        record.enrolled_at = t0;
        {
            std::lock_guard lock(mutex_);
            records_[user.user_id] = record;
            enrolling_.erase(user.user_id);
        }
        return EnrollResult{std::move(record), std::move(gas)};
    } catch (...) {
        std::lock_guard lock(mutex_);
        enrolling_.erase(user.user_id);
        throw;
    }
}

Bytes AuthzServer::issue_nonce(const std::string& user_id) {
    std::lock_guard lock(mutex_);
    if (!records_.count(user_id))
        throw Error(ErrorCode::UnknownUser, user_id);
    Bytes nonce(32);
    fill_random(nonce);
    pending_nonces_[user_id] = nonce;
    return nonce;
}

SessionId AuthzServer::open_session(const std::string& user_id,
                                    ByteView key_proof) {
    std::lock_guard lock(mutex_);
    auto rec = records_.find(user_id);
    if (rec == records_.end())
        throw Error(ErrorCode::UnknownUser, user_id);

    auto nonce = pending_nonces_.find(user_id);
    if (nonce == pending_nonces_.end())
        throw Error(ErrorCode::AuthFail, "no pending challenge");
    Digest expected = make_key_proof(rec->second.key, nonce->second);
    pending_nonces_.erase(nonce);  // one-shot either way
    if (!equal_ct(key_proof, expected))
        throw Error(ErrorCode::AuthFail, "bad key proof");

    SessionId session;
    fill_random(session.sid);
    session.user_id = user_id;
    session.expires_at =
        Timestamp{clock_().millis + config_.session_ttl_secs * 1000};
    sessions_[session.sid] = session;
    rec->second.active_sessions.insert(session.sid);
    return session;
}

RevokeResult AuthzServer::revoke_session(const Sid& sid) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(sid);
    if (it == sessions_.end()) return RevokeResult::NotFound;
    auto rec = records_.find(it->second.user_id);
    if (rec != records_.end()) rec->second.active_sessions.erase(sid);
    sessions_.erase(it);
    return RevokeResult::Ok;
}

AccessDecision AuthzServer::authorize(const AccessRequest& request) {
    validate_attrs(request.user, request.resource);

    // (1) session factor-zero gate
    UserRecord record;
    {
        std::lock_guard lock(mutex_);
        auto it = sessions_.find(request.sid);
        if (it == sessions_.end())
            return {Verdict::Denied, Reason::SessionInvalid, std::nullopt};
        if (clock_().millis >= it->second.expires_at.millis) {
            auto rec = records_.find(it->second.user_id);
            if (rec != records_.end()) rec->second.active_sessions.erase(request.sid);
            sessions_.erase(it);
            return {Verdict::Denied, Reason::SessionInvalid, std::nullopt};
        }
        if (it->second.user_id != request.user.user_id)
            return {Verdict::Denied, Reason::SessionInvalid, std::nullopt};
        record = records_.at(it->second.user_id);  // enrolled attrs are authoritative
    }

    // (2) first factor: attribute rules
    RuleSet rules = ruleset_fetch_latest(ledger_);
    if (sat_ar(rules, record.user, request.op, request.resource) !=
        ArDecision::Satisfied)
        return {Verdict::Denied, Reason::ArFail, std::nullopt};

    // (3) second factor: every presented GA must verify against the latest
    // ledger-stored filter. An empty or oversized list is never valid.
    if (request.sga.empty() || request.sga.size() > config_.sga_max)
        return {Verdict::Denied, Reason::VpFail, std::nullopt};

    BfState state = fetch_bf_state();
    if (!state.filter)
        return {Verdict::Denied, Reason::VpFail, std::nullopt};
    for (const Digest& ga_digest : request.sga) {
        VerificationPoint vp =
            gen_vp(GrantedAccess{ga_digest, Timestamp{}}, record.key);
        if (state.filter->check(vp) != Presence::Present)
            return {Verdict::Denied, Reason::VpFail, std::nullopt};
    }

    // (4) grant: issue the next GA/VP pair and persist the updated filter.
    // The decision stands on the snapshot above; the write cycle re-fetches
    // because appends are insert-only and cannot invalidate it.
    Timestamp ts = reserve_ts_block(1);
    GrantedAccess new_ga = gen_ga(record.user, request.op, request.resource, ts);
    VerificationPoint new_vp = gen_vp(new_ga, record.key);

    {
        std::lock_guard write_lock(bf_write_mutex_);
        for (int attempt = 0;; ++attempt) {
            BfState ws = fetch_bf_state();
            if (!ws.filter)
                throw Error(ErrorCode::LedgerUnavailable,
                            "filter disappeared before grant");
            BloomFilter bf = std::move(*ws.filter);
            bf.insert(new_vp);
            try {
                ledger_.append(kTopicBfUpdate, bf.serialize(),
                               ws.expected_prev_seq);
                break;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::Conflict) throw;
                if (attempt >= kLedgerRetries)
                    throw Error(ErrorCode::LedgerUnavailable,
                                "filter append kept conflicting");
            }
        }
    }

    return {Verdict::Granted, Reason::Ok, ts};
}

std::optional<BloomFilter> AuthzServer::latest_bf() const {
    auto event = ledger_.latest(kTopicBfUpdate);
    if (!event) return std::nullopt;
    return BloomFilter::deserialize(event->payload);
}

}  // namespace mfaz

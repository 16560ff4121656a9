#include "mfaz/client.hpp"

#include "mfaz/errors.hpp"
#include "mfaz/sha256.hpp"

namespace mfaz {

std::vector<GrantedAccess> InProcessChannel::enroll(const UserAttr& user,
                                                    const AuthKey& key,
                                                    std::uint32_t bootstrap_count) {
    auto result = server_.enroll(user, key,
                                 bootstrap_count == 0
                                     ? std::nullopt
                                     : std::optional<std::uint32_t>(bootstrap_count));
    return result.bootstrap_gas;
}

Bytes InProcessChannel::session_challenge(const std::string& user_id) {
    return server_.issue_nonce(user_id);
}

SessionId InProcessChannel::session_open(const std::string& user_id,
                                         ByteView key_proof) {
    return server_.open_session(user_id, key_proof);
}

AccessDecision InProcessChannel::authorize(const AccessRequest& request) {
    return server_.authorize(request);
}

std::vector<GrantedAccess> ClientAgent::enroll(std::uint32_t bootstrap_count) {
    auto gas = channel_.enroll(user_, key_, bootstrap_count);
    vault_.insert_all(gas);
    return gas;
}

SessionId ClientAgent::open_session() {
    Bytes nonce = channel_.session_challenge(user_.user_id);
    Digest proof = make_key_proof(key_, nonce);
    SessionId session = channel_.session_open(user_.user_id, proof);
    session_ = session;
    return session;
}

AccessDecision ClientAgent::request_access(Operation op,
                                           const ResourceAttr& resource,
                                           std::size_t q,
                                           std::optional<std::uint64_t> seed) {
    if (!session_)
        throw Error(ErrorCode::AuthFail, "no open session");

    std::vector<GrantedAccess> sga = vault_.select_sga(q, seed);

    AccessRequest request;
    request.user = user_;
    request.sid = session_->sid;
    request.op = op;
    request.resource = resource;
    request.sga.reserve(sga.size());
    for (const GrantedAccess& ga : sga) request.sga.push_back(ga.digest);

    AccessDecision decision = channel_.authorize(request);
    if (decision.verdict == Verdict::Granted) {
        vault_.consume(sga);
        // Regenerate the server's new GA locally from the returned timestamp.
        vault_.insert(gen_ga(user_, op, resource, *decision.new_ga_ts));
    }
    return decision;
}

}  // namespace mfaz

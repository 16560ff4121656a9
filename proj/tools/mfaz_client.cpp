#include <sys/stat.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mfaz/bytes.hpp"
#include "mfaz/client.hpp"
#include "mfaz/errors.hpp"
#include "mfaz/service.hpp"
#include "mfaz/vault.hpp"

namespace {

// Client identity sidecar (<vault>.id): user attributes, key material and
// the last opened session, as key = value lines.
struct Identity {
    mfaz::UserAttr user;
    mfaz::AuthKey key;
    std::optional<mfaz::SessionId> session;
};

std::string identity_path(const std::string& vault_path) {
    return vault_path + ".id";
}

void save_identity(const std::string& path, const Identity& id) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw mfaz::Error(mfaz::ErrorCode::RejectState, "cannot write " + path);
    ::chmod(path.c_str(), 0600);  // holds key material
    out << "user_id = " << id.user.user_id << "\n";
    out << "key_id = " << id.user.key_id << "\n";
    out << "role = " << id.user.role << "\n";
    out << "key_hex = " << mfaz::hex_encode(id.key.key_bytes) << "\n";
    if (id.session) {
        out << "sid_hex = " << mfaz::hex_encode(id.session->sid) << "\n";
        out << "sid_expires_ms = " << id.session->expires_at.millis << "\n";
    }
}

Identity load_identity(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw mfaz::Error(mfaz::ErrorCode::RejectFormat,
                          "no identity file " + path + " (run enroll first)");
    Identity id;
    std::string line, sid_hex;
    std::uint64_t sid_expires = 0;
    while (std::getline(in, line)) {
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
        };
        trim(key);
        trim(value);
        if (key == "user_id") id.user.user_id = value;
        else if (key == "key_id") id.user.key_id = value;
        else if (key == "role") id.user.role = value;
        else if (key == "key_hex") {
            mfaz::Bytes kb = mfaz::hex_decode(value);
            if (kb.size() != 32)
                throw mfaz::Error(mfaz::ErrorCode::RejectFormat, "bad key_hex");
            std::copy(kb.begin(), kb.end(), id.key.key_bytes.begin());
        } else if (key == "sid_hex") sid_hex = value;
        else if (key == "sid_expires_ms") sid_expires = std::stoull(value);
    }
    id.key.key_id = id.user.key_id;
    if (!sid_hex.empty()) {
        mfaz::Bytes sid = mfaz::hex_decode(sid_hex);
        if (sid.size() != 16)
            throw mfaz::Error(mfaz::ErrorCode::RejectFormat, "bad sid_hex");
        mfaz::SessionId session;
        std::copy(sid.begin(), sid.end(), session.sid.begin());
        session.user_id = id.user.user_id;
        session.expires_at = mfaz::Timestamp{sid_expires};
        id.session = session;
    }
    return id;
}

std::uint16_t effective_port(std::uint16_t port) {
    if (const char* env = std::getenv("MFAZ_PORT"))
        return std::uint16_t(std::stoul(env));
    return port;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mfaz-client: enroll, open sessions, request access"};
    app.require_subcommand(1);

    std::string vault_path, host = "127.0.0.1";
    std::uint16_t port = 7461;
    app.add_option("--vault", vault_path, "vault file path")->required();
    app.add_option("--host", host, "server host");
    app.add_option("--port", port, "server port");

    auto* enroll = app.add_subcommand("enroll", "enroll a new user");
    std::string user_id, role;
    std::uint32_t count = 0;
    enroll->add_option("--user", user_id, "user id")->required();
    enroll->add_option("--role", role, "optional role attribute");
    enroll->add_option("--count", count, "bootstrap GA count (0: server default)");

    auto* session = app.add_subcommand("session", "open a session");

    auto* request = app.add_subcommand("request", "request access");
    std::string op_name, resource_id, class_name = "private";
    std::size_t q = 1;
    std::optional<std::uint64_t> seed;
    request->add_option("--op", op_name, "read|write|execute")->required();
    request->add_option("--resource", resource_id, "resource id")->required();
    request->add_option("--class", class_name, "private|public");
    request->add_option("--q", q, "number of GAs to present");
    std::uint64_t seed_value = 0;
    auto* seed_opt = request->add_option("--seed", seed_value,
                                         "deterministic GA selection seed");

    CLI11_PARSE(app, argc, argv);

    try {
        mfaz::WireChannel channel(host, effective_port(port));

        if (*enroll) {
            Identity id;
            id.user = mfaz::UserAttr{user_id, user_id + "-key", role};
            id.key.key_id = id.user.key_id;
            mfaz::fill_random(id.key.key_bytes);

            mfaz::GaVault vault = mfaz::GaVault::open(vault_path, user_id);
            mfaz::ClientAgent agent(id.user, id.key, vault, channel);
            auto gas = agent.enroll(count);
            save_identity(identity_path(vault_path), id);
            std::cout << "enrolled " << user_id << ": " << gas.size()
                      << " bootstrap GAs in " << vault_path << "\n";
            return 0;
        }

        Identity id = load_identity(identity_path(vault_path));
        mfaz::GaVault vault = mfaz::GaVault::open(vault_path, id.user.user_id);
        mfaz::ClientAgent agent(id.user, id.key, vault, channel);

        if (*session) {
            mfaz::SessionId opened = agent.open_session();
            id.session = opened;
            save_identity(identity_path(vault_path), id);
            std::cout << "session " << mfaz::hex_encode(opened.sid)
                      << " expires_ms=" << opened.expires_at.millis << "\n";
            return 0;
        }

        // request
        auto op = mfaz::operation_from_name(op_name);
        if (!op) {
            std::cerr << "error: unknown op " << op_name << "\n";
            return 1;
        }
        auto rc = mfaz::resource_class_from_name(class_name);
        if (!rc) {
            std::cerr << "error: unknown class " << class_name << "\n";
            return 1;
        }
        if (!id.session) {
            std::cerr << "error: no session (run session first)\n";
            return 1;
        }
        if (seed_opt->count() > 0) seed = seed_value;

        agent.adopt_session(*id.session);
        mfaz::AccessDecision decision = agent.request_access(
            *op, mfaz::ResourceAttr{resource_id, *rc}, q, seed);
        std::cout << mfaz::verdict_name(decision.verdict) << " "
                  << mfaz::reason_name(decision.reason);
        if (decision.new_ga_ts)
            std::cout << " new_ga_ts=" << decision.new_ga_ts->millis;
        std::cout << " vault_size=" << vault.size() << "\n";
        return decision.verdict == mfaz::Verdict::Granted ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

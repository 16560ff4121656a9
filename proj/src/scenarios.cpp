#include "mfaz/scenarios.hpp"

#include <map>
#include <random>
#include <sstream>

#include "mfaz/client.hpp"
#include "mfaz/errors.hpp"
#include "mfaz/sha256.hpp"
#include "mfaz/vault.hpp"

namespace mfaz {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

SgaKind sga_kind_from(const std::string& s, std::size_t line_no) {
    if (s == "valid") return SgaKind::Valid;
    if (s == "forged") return SgaKind::Forged;
    if (s == "empty") return SgaKind::Empty;
    if (s == "no_rule") return SgaKind::NoRule;
    throw Error(ErrorCode::RejectFormat,
                "line " + std::to_string(line_no) + ": unknown sga kind '" + s + "'");
}

Reason reason_from(const std::string& s, std::size_t line_no) {
    if (s == "OK") return Reason::Ok;
    if (s == "AR_FAIL") return Reason::ArFail;
    if (s == "VP_FAIL") return Reason::VpFail;
    if (s == "SESSION_INVALID") return Reason::SessionInvalid;
    throw Error(ErrorCode::RejectFormat,
                "line " + std::to_string(line_no) + ": unknown reason '" + s + "'");
}

}  // namespace

std::vector<Scenario> parse_scenarios(std::string_view text) {
    std::vector<Scenario> suite;
    Scenario current;
    bool in_scenario = false;

    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t comment = line.find('#');
        if (comment != std::string::npos) line.resize(comment);
        auto toks = split_ws(line);
        if (toks.empty()) continue;

        auto fail = [&](const std::string& why) -> Error {
            return Error(ErrorCode::RejectFormat,
                         "line " + std::to_string(line_no) + ": " + why);
        };

        if (toks[0] == "scenario") {
            if (in_scenario) throw fail("nested scenario");
            if (toks.size() != 2) throw fail("scenario needs a name");
            current = Scenario{toks[1], {}};
            in_scenario = true;
            continue;
        }
        if (!in_scenario) throw fail("statement outside scenario");

        if (toks[0] == "end") {
            suite.push_back(std::move(current));
            in_scenario = false;
            continue;
        }

        ScenarioAction action;
        if (toks[0] == "rule") {
            // the remainder of the line, verbatim
            std::size_t at = line.find("rule");
            action.kind = ScenarioAction::Kind::Rule;
            action.arg0 = line.substr(at + 5);
        } else if (toks[0] == "enroll") {
            if (toks.size() != 2) throw fail("enroll <party>");
            action.kind = ScenarioAction::Kind::Enroll;
            action.arg0 = toks[1];
        } else if (toks[0] == "open_session") {
            if (toks.size() != 2) throw fail("open_session <party>");
            action.kind = ScenarioAction::Kind::OpenSession;
            action.arg0 = toks[1];
        } else if (toks[0] == "steal_sid") {
            if (toks.size() != 3) throw fail("steal_sid <attacker> <victim>");
            action.kind = ScenarioAction::Kind::StealSid;
            action.arg0 = toks[1];
            action.arg1 = toks[2];
        } else if (toks[0] == "revoke_victim") {
            if (toks.size() != 2) throw fail("revoke_victim <victim>");
            action.kind = ScenarioAction::Kind::RevokeVictim;
            action.arg0 = toks[1];
        } else if (toks[0] == "repeat" || toks[0] == "request") {
            std::size_t base = 0;
            std::uint32_t repeat = 1;
            if (toks[0] == "repeat") {
                if (toks.size() < 3 || toks[2] != "request")
                    throw fail("repeat N request ...");
                repeat = std::uint32_t(std::stoul(toks[1]));
                if (repeat == 0) throw fail("repeat count must be positive");
                base = 2;
            }
            if (toks.size() != base + 9 || toks[base + 6] != "expect")
                throw fail("request <party> <op> <resource> <class> <sga> "
                           "expect <verdict> <reason>");
            RequestAction req;
            req.party = toks[base + 1];
            auto op = operation_from_name(toks[base + 2]);
            if (!op) throw fail("unknown operation '" + toks[base + 2] + "'");
            req.op = *op;
            req.resource.resource_id = toks[base + 3];
            auto rc = resource_class_from_name(toks[base + 4]);
            if (!rc) throw fail("unknown resource class '" + toks[base + 4] + "'");
            req.resource.resource_class = *rc;
            req.sga_kind = sga_kind_from(toks[base + 5], line_no);
            if (toks[base + 7] == "GRANTED")
                req.expected_verdict = Verdict::Granted;
            else if (toks[base + 7] == "DENIED")
                req.expected_verdict = Verdict::Denied;
            else
                throw fail("verdict must be GRANTED or DENIED");
            req.expected_reason = reason_from(toks[base + 8], line_no);
            req.repeat = repeat;
            action.kind = ScenarioAction::Kind::Request;
            action.request = req;
        } else {
            throw fail("unknown action '" + toks[0] + "'");
        }
        current.actions.push_back(std::move(action));
    }
    if (in_scenario)
        throw Error(ErrorCode::RejectFormat, "unterminated scenario");
    return suite;
}

namespace {

struct Party {
    UserAttr user;
    AuthKey key;
    std::optional<GaVault> vault;
    std::optional<ClientAgent> agent;
    std::optional<SessionId> session;
    std::string impersonates;  // set after steal_sid
};

AuthKey deterministic_key(const std::string& party, std::uint32_t salt) {
    AuthKey key;
    key.key_id = party + "-key";
    Digest d = sha256(to_bytes(party + "/" + std::to_string(salt)));
    std::copy(d.begin(), d.end(), key.key_bytes.begin());
    return key;
}

class ScenarioRun {
public:
    explicit ScenarioRun(const ServerConfig& config)
        : ledger_(), server_(ledger_, config), channel_(server_) {}

    void apply(const ScenarioAction& action, ScenarioSuiteReport& report,
               ScenarioResult& result) {
        switch (action.kind) {
            case ScenarioAction::Kind::Rule: {
                RuleSet parsed = parse_rules_text(action.arg0);
                rules_.rules.insert(rules_.rules.end(), parsed.rules.begin(),
                                    parsed.rules.end());
                ruleset_store(rules_, ledger_);
                return;
            }
            case ScenarioAction::Kind::Enroll: {
                Party& p = party(action.arg0);
                p.user = UserAttr{action.arg0, action.arg0 + "-key", ""};
                p.key = deterministic_key(action.arg0, salt_++);
                p.vault = GaVault::in_memory(action.arg0);
                p.agent.emplace(p.user, p.key, *p.vault, channel_);
                p.agent->enroll();
                return;
            }
            case ScenarioAction::Kind::OpenSession: {
                Party& p = party(action.arg0);
                if (!p.agent)
                    throw Error(ErrorCode::ScenarioSetupFail,
                                action.arg0 + " has no enrollment");
                p.session = p.agent->open_session();
                return;
            }
            case ScenarioAction::Kind::StealSid: {
                Party& attacker = party(action.arg0);
                Party& victim = party(action.arg1);
                if (!victim.session)
                    throw Error(ErrorCode::ScenarioSetupFail,
                                action.arg1 + " has no session to steal");
                attacker.session = victim.session;
                attacker.impersonates = action.arg1;
                return;
            }
            case ScenarioAction::Kind::RevokeVictim: {
                Party& victim = party(action.arg0);
                if (!victim.session)
                    throw Error(ErrorCode::ScenarioSetupFail,
                                action.arg0 + " has no session to revoke");
                server_.revoke_session(victim.session->sid);
                return;
            }
            case ScenarioAction::Kind::Request:
                for (std::uint32_t i = 0; i < action.request.repeat; ++i)
                    run_request(action.request, report, result);
                return;
        }
    }

private:
    Party& party(const std::string& name) { return parties_[name]; }

    void run_request(const RequestAction& req, ScenarioSuiteReport& report,
                     ScenarioResult& result) {
        Party& p = party(req.party);
        AccessDecision decision;

        if ((req.sga_kind == SgaKind::Valid || req.sga_kind == SgaKind::NoRule) &&
            p.agent && p.impersonates.empty()) {
            decision = p.agent->request_access(req.op, req.resource, 1);
        } else {
            AccessRequest raw;
            const Party& identity =
                p.impersonates.empty() ? p : party(p.impersonates);
            raw.user = identity.user;
            if (raw.user.user_id.empty())
                raw.user = UserAttr{req.party, req.party + "-key", ""};
            if (p.session) raw.sid = p.session->sid;
            raw.op = req.op;
            raw.resource = req.resource;
            if (req.sga_kind == SgaKind::Forged) {
                Digest forged;
                for (auto& b : forged) b = std::uint8_t(forge_rng_());
                raw.sga.push_back(forged);
            } else if (req.sga_kind != SgaKind::Empty && p.vault &&
                       p.vault->size() > 0) {
                raw.sga.push_back(p.vault->select_sga(1).front().digest);
            }
            // Empty kind sends no GAs at all.
            decision = server_.authorize(raw);
        }

        ++result.requests;
        bool attack = req.expected_verdict == Verdict::Denied;
        if (attack && decision.verdict == Verdict::Granted)
            ++report.false_grant_count;
        if (!attack && decision.verdict == Verdict::Denied)
            ++report.false_deny_count;

        if (result.pass &&
            (decision.verdict != req.expected_verdict ||
             decision.reason != req.expected_reason)) {
            result.pass = false;
            result.detail = "request " + std::to_string(result.requests) + " by " +
                            req.party + ": expected " +
                            std::string(verdict_name(req.expected_verdict)) + "/" +
                            reason_name(req.expected_reason) + ", got " +
                            verdict_name(decision.verdict) + "/" +
                            reason_name(decision.reason);
        }
    }

    InMemoryLedger ledger_;
    AuthzServer server_;
    InProcessChannel channel_;
    RuleSet rules_;
    std::map<std::string, Party> parties_;
    std::mt19937_64 forge_rng_{0x5eed};
    std::uint32_t salt_ = 0;
};

}  // namespace

ScenarioSuiteReport run_scenarios(const std::vector<Scenario>& suite,
                                  const ServerConfig& config) {
    ScenarioSuiteReport report;
    for (const Scenario& scenario : suite) {
        ScenarioResult result;
        result.name = scenario.name;
        result.pass = true;
        try {
            ScenarioRun run(config);
            for (const ScenarioAction& action : scenario.actions)
                run.apply(action, report, result);
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("setup failure: ") + e.what();
        }
        report.results.push_back(std::move(result));
    }
    return report;
}

std::string format_scenario_report(const ScenarioSuiteReport& report) {
    std::ostringstream out;
    for (const ScenarioResult& r : report.results) {
        out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.requests
            << " requests)";
        if (!r.detail.empty()) out << " - " << r.detail;
        out << "\n";
    }
    out << "false_grants=" << report.false_grant_count
        << " false_denies=" << report.false_deny_count << "\n";
    return out.str();
}

std::string default_scenario_suite() {
    return R"(# Default suite: conventional broken-access-control, session hijacking
# variants, and legitimate request chains.

# An enrolled, rule-less user: the first factor alone must deny.
scenario conventional-bac-no-rule
rule alice;read;public
enroll alice
open_session alice
request alice write vault1 private valid expect DENIED AR_FAIL
request alice read vault1 private no_rule expect DENIED AR_FAIL
end

# Rules name alice only; bob's valid second factor must not help.
scenario conventional-bac-unauthorized-user
rule alice;read,write;public
enroll alice
enroll bob
open_session bob
request bob read feed1 public valid expect DENIED AR_FAIL
end

# Fixation: attacker knows the sid before the victim authenticates.
# Post-theft state is the same for every technique: a live sid, no GAs.
scenario hijack-fixation
rule *;read;public
enroll alice
open_session alice
steal_sid mallory alice
request mallory read feed1 public forged expect DENIED VP_FAIL
end

# XSS: sid lifted from the victim's browser storage; attacker sends no GAs.
scenario hijack-xss
rule *;read;public
enroll alice
open_session alice
steal_sid mallory alice
request mallory read feed1 public empty expect DENIED VP_FAIL
end

# Brute-forced sid; attacker guesses GA digests too.
scenario hijack-bruteforce
rule *;read,write;public
enroll alice
open_session alice
steal_sid mallory alice
request mallory write feed1 public forged expect DENIED VP_FAIL
request mallory read feed1 public forged expect DENIED VP_FAIL
end

# Takeover with DoS: the attacker holds a fixated sid, knocks the victim's
# own session out to dodge concurrent-use suspicion, then replays.
scenario hijack-with-dos
rule *;read;public
enroll alice
open_session alice
steal_sid mallory alice
open_session alice
revoke_victim alice
request mallory read feed1 public forged expect DENIED VP_FAIL
end

scenario legitimate-chain-read
rule alice;read;sensor1
enroll alice
open_session alice
repeat 20 request alice read sensor1 private valid expect GRANTED OK
end

scenario legitimate-chain-mixed
rule carol;read,write,execute;*
enroll carol
open_session carol
repeat 10 request carol read sensor2 private valid expect GRANTED OK
repeat 5 request carol write sensor2 private valid expect GRANTED OK
repeat 5 request carol execute actuator1 public valid expect GRANTED OK
end
)";
}

}  // namespace mfaz

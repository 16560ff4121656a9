#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfaz/server.hpp"

namespace mfaz {

/// Scripted attack / legitimate-use scenarios, parsed from a line-oriented
/// suite file:
///
///   scenario <name>
///   rule <subject>;<ops>;<resource>
///   enroll <party>
///   open_session <party>
///   steal_sid <attacker> <victim>
///   revoke_victim <victim>
///   [repeat N] request <party> <op> <resource_id> <class>
///       <valid|forged|empty|no_rule> expect <GRANTED|DENIED> <reason>
///   end
///
/// (a request statement is one line; it is wrapped here for width)
///
/// Each scenario runs against a fresh in-process server and ledger. A party
/// gains a vault and key by `enroll`; `steal_sid` hands the victim's live
/// sid to the attacker, who then impersonates the victim's attributes.
/// `no_rule` sends valid vault GAs at a target no rule covers.

enum class SgaKind { Valid, Forged, Empty, NoRule };

struct RequestAction {
    std::string party;
    Operation op = Operation::Read;
    ResourceAttr resource;
    SgaKind sga_kind = SgaKind::Valid;
    Verdict expected_verdict = Verdict::Denied;
    Reason expected_reason = Reason::VpFail;
    std::uint32_t repeat = 1;
};

struct ScenarioAction {
    enum class Kind { Rule, Enroll, OpenSession, StealSid, RevokeVictim, Request };
    Kind kind = Kind::Rule;
    std::string arg0;  // rule line / party / attacker
    std::string arg1;  // victim for steal_sid
    RequestAction request;
};

struct Scenario {
    std::string name;
    std::vector<ScenarioAction> actions;
};

std::vector<Scenario> parse_scenarios(std::string_view text);

/// The shipped default suite: two conventional broken-access-control
/// scenarios, four session-hijack variants, two legitimate chains.
std::string default_scenario_suite();

struct ScenarioResult {
    std::string name;
    bool pass = false;
    std::uint64_t requests = 0;
    std::string detail;  // first mismatch or setup failure
};

struct ScenarioSuiteReport {
    std::vector<ScenarioResult> results;
    std::uint64_t false_grant_count = 0;  // attack request granted
    std::uint64_t false_deny_count = 0;   // legitimate request denied
    bool all_pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
};

ScenarioSuiteReport run_scenarios(const std::vector<Scenario>& suite,
                                  const ServerConfig& config = {});

std::string format_scenario_report(const ScenarioSuiteReport& report);

}  // namespace mfaz

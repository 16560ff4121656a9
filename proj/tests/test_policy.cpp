#include <doctest.h>

#include <algorithm>
#include <random>

#include "mfaz/errors.hpp"
#include "mfaz/policy.hpp"

using namespace mfaz;

namespace {

// Independent brute-force matcher: re-implements rule semantics from the
// written contract, no shared code with sat_ar.
bool oracle_matches(const AccessRule& rule, const UserAttr& u, Operation o,
                    const ResourceAttr& r) {
    bool subject = rule.subject_pattern == "*" ||
                   rule.subject_pattern == u.user_id ||
                   (!u.role.empty() && rule.subject_pattern == u.role);
    bool op = rule.operations.contains(o);
    std::string class_name =
        r.resource_class == ResourceClass::Private ? "private" : "public";
    bool resource = rule.resource_pattern == "*" ||
                    rule.resource_pattern == r.resource_id ||
                    rule.resource_pattern == class_name;
    return subject && op && resource;
}

bool oracle_decision(const RuleSet& rs, const UserAttr& u, Operation o,
                     const ResourceAttr& r) {
    for (const AccessRule& rule : rs.rules)
        if (oracle_matches(rule, u, o, r)) return true;
    return false;
}

// 3 users x 3 ops x 4 resources
const std::vector<UserAttr> kUsers = {
    {"alice", "ka", "operator"}, {"bob", "kb", ""}, {"carol", "kc", "auditor"}};
const std::vector<Operation> kOps = {Operation::Read, Operation::Write,
                                     Operation::Execute};
const std::vector<ResourceAttr> kResources = {
    {"sensor1", ResourceClass::Private},
    {"sensor1", ResourceClass::Public},
    {"feed2", ResourceClass::Public},
    {"vault3", ResourceClass::Private}};

AccessRule random_rule(std::mt19937_64& rng) {
    static const std::vector<std::string> subjects = {"*", "alice", "bob",
                                                      "operator", "auditor",
                                                      "nobody"};
    static const std::vector<std::string> resources = {
        "*", "sensor1", "feed2", "private", "public", "unknown"};
    AccessRule rule;
    rule.subject_pattern = subjects[rng() % subjects.size()];
    rule.resource_pattern = resources[rng() % resources.size()];
    while (rule.operations.empty()) {
        for (Operation op : kOps)
            if (rng() & 1) rule.operations.add(op);
    }
    return rule;
}

}  // namespace

TEST_CASE("empty ruleset denies everything") {
    RuleSet rs;
    for (const auto& u : kUsers)
        for (auto o : kOps)
            for (const auto& r : kResources)
                CHECK(sat_ar(rs, u, o, r) == ArDecision::NotSatisfied);
}

TEST_CASE("wildcard rule on a class matches any user") {
    RuleSet rs;
    rs.rules.push_back(
        AccessRule{"*", OperationSet{Operation::Read}, "public"});
    CHECK(sat_ar(rs, kUsers[1], Operation::Read,
                 ResourceAttr{"anything", ResourceClass::Public}) ==
          ArDecision::Satisfied);
    CHECK(sat_ar(rs, kUsers[1], Operation::Write,
                 ResourceAttr{"anything", ResourceClass::Public}) ==
          ArDecision::NotSatisfied);
    CHECK(sat_ar(rs, kUsers[1], Operation::Read,
                 ResourceAttr{"anything", ResourceClass::Private}) ==
          ArDecision::NotSatisfied);
}

TEST_CASE("role patterns match the role attribute") {
    RuleSet rs;
    rs.rules.push_back(
        AccessRule{"operator", OperationSet{Operation::Execute}, "*"});
    CHECK(sat_ar(rs, kUsers[0], Operation::Execute, kResources[0]) ==
          ArDecision::Satisfied);
    CHECK(sat_ar(rs, kUsers[1], Operation::Execute, kResources[0]) ==
          ArDecision::NotSatisfied);
}

TEST_CASE("random rulesets agree with the brute-force oracle everywhere") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        RuleSet rs;
        std::size_t n = trial % 6;  // includes the empty set
        for (std::size_t i = 0; i < n; ++i) rs.rules.push_back(random_rule(rng));

        for (const auto& u : kUsers) {
            for (auto o : kOps) {
                for (const auto& r : kResources) {
                    bool expect = oracle_decision(rs, u, o, r);
                    CHECK((sat_ar(rs, u, o, r) == ArDecision::Satisfied) ==
                          expect);
                }
            }
        }
    }
}

TEST_CASE("permuting rules never changes a decision") {
    std::mt19937_64 rng(7);
    RuleSet rs;
    for (int i = 0; i < 5; ++i) rs.rules.push_back(random_rule(rng));

    RuleSet shuffled = rs;
    std::shuffle(shuffled.rules.begin(), shuffled.rules.end(), rng);
    for (const auto& u : kUsers)
        for (auto o : kOps)
            for (const auto& r : kResources)
                CHECK(sat_ar(rs, u, o, r) == sat_ar(shuffled, u, o, r));
}

TEST_CASE("adding a rule never flips satisfied to denied") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 50; ++trial) {
        RuleSet rs;
        for (int i = 0; i < 3; ++i) rs.rules.push_back(random_rule(rng));
        RuleSet extended = rs;
        extended.rules.push_back(random_rule(rng));

        for (const auto& u : kUsers) {
            for (auto o : kOps) {
                for (const auto& r : kResources) {
                    if (sat_ar(rs, u, o, r) == ArDecision::Satisfied)
                        CHECK(sat_ar(extended, u, o, r) ==
                              ArDecision::Satisfied);
                }
            }
        }
    }
}

TEST_CASE("rules text parses, formats and round-trips") {
    const char* text =
        "# operators may do anything to public resources\n"
        "operator;read,write,execute;public\n"
        "\n"
        "alice ; read ; sensor1\n"
        "*;read;public\n";
    RuleSet rs = parse_rules_text(text);
    REQUIRE(rs.rules.size() == 3);
    CHECK(rs.rules[0].subject_pattern == "operator");
    CHECK(rs.rules[0].operations.mask() == 0x07);
    CHECK(rs.rules[1].subject_pattern == "alice");
    CHECK(rs.rules[1].resource_pattern == "sensor1");

    RuleSet again = parse_rules_text(format_rules_text(rs));
    REQUIRE(again.rules.size() == rs.rules.size());
    for (std::size_t i = 0; i < rs.rules.size(); ++i)
        CHECK(again.rules[i] == rs.rules[i]);
}

TEST_CASE("malformed rules are rejected") {
    CHECK_THROWS_AS(parse_rules_text("just-words\n"), Error);
    CHECK_THROWS_AS(parse_rules_text("alice;fly;sensor1\n"), Error);
    CHECK_THROWS_AS(parse_rules_text("alice;;sensor1\n"), Error);
    CHECK_THROWS_AS(parse_rules_text(";read;sensor1\n"), Error);
}

TEST_CASE("binary serialization round-trips") {
    std::mt19937_64 rng(31);
    RuleSet rs;
    rs.version = 17;
    for (int i = 0; i < 6; ++i) rs.rules.push_back(random_rule(rng));

    RuleSet back = ruleset_deserialize(ruleset_serialize(rs));
    CHECK(back.version == rs.version);
    REQUIRE(back.rules.size() == rs.rules.size());
    for (std::size_t i = 0; i < rs.rules.size(); ++i)
        CHECK(back.rules[i] == rs.rules[i]);
}

TEST_CASE("ruleset store and fetch through the ledger bump versions") {
    InMemoryLedger ledger;
    CHECK(ruleset_fetch_latest(ledger).rules.empty());

    RuleSet v1 = parse_rules_text("alice;read;sensor1\n");
    ruleset_store(v1, ledger);
    RuleSet fetched = ruleset_fetch_latest(ledger);
    CHECK(fetched.version == 1);
    REQUIRE(fetched.rules.size() == 1);

    RuleSet v2 = parse_rules_text("alice;read;sensor1\n*;read;public\n");
    ruleset_store(v2, ledger);
    fetched = ruleset_fetch_latest(ledger);
    CHECK(fetched.version == 2);
    CHECK(fetched.rules.size() == 2);
    CHECK(ledger.verify().ok);
}

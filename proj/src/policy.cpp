#include "mfaz/policy.hpp"

#include <sstream>

#include "mfaz/encoding.hpp"
#include "mfaz/errors.hpp"

namespace mfaz {

namespace {

bool subject_matches(const std::string& pattern, const UserAttr& user) {
    if (pattern == "*") return true;
    if (pattern == user.user_id) return true;
    return !user.role.empty() && pattern == user.role;
}

bool resource_matches(const std::string& pattern, const ResourceAttr& resource) {
    if (pattern == "*") return true;
    if (pattern == resource.resource_id) return true;
    return pattern == resource_class_name(resource.resource_class);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

ArDecision sat_ar(const RuleSet& ruleset, const UserAttr& user, Operation op,
                  const ResourceAttr& resource) {
    for (const AccessRule& rule : ruleset.rules) {
        if (subject_matches(rule.subject_pattern, user) &&
            rule.operations.contains(op) &&
            resource_matches(rule.resource_pattern, resource))
            return ArDecision::Satisfied;
    }
    return ArDecision::NotSatisfied;
}

RuleSet parse_rules_text(std::string_view text) {
    RuleSet out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;

        std::size_t p1 = line.find(';');
        std::size_t p2 = (p1 == std::string::npos) ? std::string::npos
                                                   : line.find(';', p1 + 1);
        if (p2 == std::string::npos)
            throw Error(ErrorCode::RejectFormat,
                        "rule line " + std::to_string(line_no) +
                            ": expected subject;ops;resource");

        AccessRule rule;
        rule.subject_pattern = trim(line.substr(0, p1));
        rule.resource_pattern = trim(line.substr(p2 + 1));

        std::istringstream ops(line.substr(p1 + 1, p2 - p1 - 1));
        std::string op_name;
        while (std::getline(ops, op_name, ',')) {
            op_name = trim(op_name);
            auto op = operation_from_name(op_name);
            if (!op)
                throw Error(ErrorCode::RejectFormat,
                            "rule line " + std::to_string(line_no) +
                                ": unknown operation '" + op_name + "'");
            rule.operations.add(*op);
        }
        if (rule.operations.empty() || rule.subject_pattern.empty() ||
            rule.resource_pattern.empty())
            throw Error(ErrorCode::RejectFormat,
                        "rule line " + std::to_string(line_no) + ": empty part");
        out.rules.push_back(std::move(rule));
    }
    return out;
}

std::string format_rules_text(const RuleSet& ruleset) {
    std::string out;
    for (const AccessRule& rule : ruleset.rules) {
        out += rule.subject_pattern + ";";
        bool first = true;
        for (Operation op : {Operation::Read, Operation::Write, Operation::Execute}) {
            if (!rule.operations.contains(op)) continue;
            if (!first) out += ",";
            out += operation_name(op);
            first = false;
        }
        out += ";" + rule.resource_pattern + "\n";
    }
    return out;
}

Bytes ruleset_serialize(const RuleSet& ruleset) {
    Bytes rules_blob;
    for (const AccessRule& rule : ruleset.rules) {
        Bytes encoded = canonical_encode({
            {0x01, to_bytes(rule.subject_pattern)},
            {0x02, {rule.operations.mask()}},
            {0x03, to_bytes(rule.resource_pattern)},
        });
        write_be32(rules_blob, std::uint32_t(encoded.size()));
        rules_blob.insert(rules_blob.end(), encoded.begin(), encoded.end());
    }
    const auto version_be = be64_bytes(ruleset.version);
    return canonical_encode({
        {0x01, Bytes(version_be.begin(), version_be.end())},
        {0x02, std::move(rules_blob)},
    });
}

RuleSet ruleset_deserialize(ByteView data) {
    auto fields = canonical_decode(data);
    if (fields.size() != 2 || fields[0].tag != 0x01 || fields[1].tag != 0x02 ||
        fields[0].payload.size() != 8)
        throw Error(ErrorCode::RejectFormat, "bad ruleset layout");

    RuleSet out;
    out.version = read_be64(fields[0].payload.data());
    const Bytes& blob = fields[1].payload;
    std::size_t pos = 0;
    while (pos < blob.size()) {
        if (blob.size() - pos < 4)
            throw Error(ErrorCode::RejectFormat, "truncated rule length");
        std::uint32_t len = read_be32(blob.data() + pos);
        pos += 4;
        if (blob.size() - pos < len)
            throw Error(ErrorCode::RejectFormat, "truncated rule");
        auto rf = canonical_decode(ByteView(blob.data() + pos, len));
        if (rf.size() != 3 || rf[1].payload.size() != 1)
            throw Error(ErrorCode::RejectFormat, "bad rule layout");
        AccessRule rule;
        rule.subject_pattern = to_string(rf[0].payload);
        rule.operations = OperationSet::from_mask(rf[1].payload[0]);
        rule.resource_pattern = to_string(rf[2].payload);
        if (rule.operations.empty())
            throw Error(ErrorCode::RejectFormat, "rule with empty operation set");
        out.rules.push_back(std::move(rule));
        pos += len;
    }
    return out;
}

LedgerEvent ruleset_store(const RuleSet& ruleset, Ledger& ledger) {
    RuleSet stored = ruleset;
    stored.version = ruleset_fetch_latest(ledger).version + 1;
    return ledger.append(kTopicArUpdate, ruleset_serialize(stored),
                         ledger.head_seq());
}

RuleSet ruleset_fetch_latest(const Ledger& ledger) {
    auto event = ledger.latest(kTopicArUpdate);
    if (!event) return RuleSet{};
    return ruleset_deserialize(event->payload);
}

}  // namespace mfaz

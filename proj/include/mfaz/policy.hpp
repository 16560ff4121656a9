#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfaz/bytes.hpp"
#include "mfaz/core.hpp"
#include "mfaz/ledger.hpp"

namespace mfaz {

/// Non-empty subset of {Read, Write, Execute} as a bitmask.
class OperationSet {
public:
    OperationSet() = default;
    explicit OperationSet(std::initializer_list<Operation> ops) {
        for (Operation op : ops) add(op);
    }

    void add(Operation op) { mask_ |= bit(op); }
    bool contains(Operation op) const { return mask_ & bit(op); }
    bool empty() const { return mask_ == 0; }
    std::uint8_t mask() const { return mask_; }
    static OperationSet from_mask(std::uint8_t mask) {
        OperationSet s;
        s.mask_ = mask & 0x07;
        return s;
    }

    bool operator==(const OperationSet&) const = default;

private:
    static std::uint8_t bit(Operation op) {
        return std::uint8_t(1u << (std::uint8_t(op) - 1));
    }
    std::uint8_t mask_ = 0;
};

/// Allow rule: subject matches user_id or role, resource matches
/// resource_id or class name; "*" is the wildcard. There are no deny
/// rules; absence of a matching rule denies.
struct AccessRule {
    std::string subject_pattern;
    OperationSet operations;
    std::string resource_pattern;

    bool operator==(const AccessRule&) const = default;
};

struct RuleSet {
    std::vector<AccessRule> rules;
    std::uint64_t version = 0;
};

enum class ArDecision { Satisfied, NotSatisfied };

/// First authorization factor: Satisfied iff at least one rule matches the
/// (user, operation, resource) triple. Pure; order-insensitive; monotone in
/// the rule list.
ArDecision sat_ar(const RuleSet& ruleset, const UserAttr& user, Operation op,
                  const ResourceAttr& resource);

/// Line format: subject;op1,op2;resource with '#' comments and blank lines
/// ignored. Throws Error{RejectFormat} on malformed lines.
RuleSet parse_rules_text(std::string_view text);
std::string format_rules_text(const RuleSet& ruleset);

/// Canonical binary form used for ledger storage.
Bytes ruleset_serialize(const RuleSet& ruleset);
RuleSet ruleset_deserialize(ByteView data);

/// Appends the ruleset under "AR_UPDATE" with version bumped past the
/// currently stored one. Propagates Error{Conflict} from the ledger.
LedgerEvent ruleset_store(const RuleSet& ruleset, Ledger& ledger);

/// Latest ledger-stored ruleset; empty default-deny RuleSet when none.
RuleSet ruleset_fetch_latest(const Ledger& ledger);

}  // namespace mfaz

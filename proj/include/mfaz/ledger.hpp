#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mfaz/bytes.hpp"
#include "mfaz/core.hpp"

namespace mfaz {

/// Immutable, sequence-numbered record. event_hash covers
/// seq ‖ topic ‖ payload ‖ prev_hash (canonical encoding); prev_hash of
/// event n equals event_hash of event n-1, genesis uses 32 zero bytes.
struct LedgerEvent {
    std::uint64_t seq = 0;
    std::string topic;
    Bytes payload;
    Digest prev_hash{};
    Digest event_hash{};
    Timestamp appended_at;
};

Digest ledger_event_hash(std::uint64_t seq, const std::string& topic,
                         const Bytes& payload, const Digest& prev_hash);

struct VerifyResult {
    bool ok = true;
    std::uint64_t corrupt_seq = 0;  // first seq whose linkage fails
};

inline constexpr char kTopicBfUpdate[] = "BF_UPDATE";
inline constexpr char kTopicArUpdate[] = "AR_UPDATE";

/// Append-only event log standing in for the blockchain layer. Append and
/// latest are atomic; append uses an optimistic-concurrency token
/// (expected_prev_seq) and throws Error{Conflict} when it is stale, so
/// read-modify-write cycles serialize without blocking.
class Ledger {
public:
    virtual ~Ledger() = default;

    /// expected_prev_seq must equal the current highest seq (0 for empty).
    /// Throws Error{Conflict} on a stale token, Error{RejectPayload} on an
    /// empty payload. Linearizable.
    virtual LedgerEvent append(const std::string& topic, const Bytes& payload,
                               std::uint64_t expected_prev_seq) = 0;

    /// Highest-seq event with a matching topic, or nullopt.
    virtual std::optional<LedgerEvent> latest(const std::string& topic) const = 0;

    /// Recomputes the whole hash chain.
    virtual VerifyResult verify() const = 0;

    virtual std::uint64_t head_seq() const = 0;
    virtual std::uint64_t size() const = 0;
};

class InMemoryLedger : public Ledger {
public:
    /// Optional visibility delay (default 0) emulates mining latency:
    /// latest() hides an event until delay_ms has elapsed since its append.
    explicit InMemoryLedger(std::uint64_t visibility_delay_ms = 0);

    LedgerEvent append(const std::string& topic, const Bytes& payload,
                       std::uint64_t expected_prev_seq) override;
    std::optional<LedgerEvent> latest(const std::string& topic) const override;
    VerifyResult verify() const override;
    std::uint64_t head_seq() const override;
    std::uint64_t size() const override;

private:
    mutable std::mutex mutex_;
    std::vector<LedgerEvent> events_;
    std::uint64_t visibility_delay_ms_;
    mutable std::vector<std::uint64_t> visible_at_;  // steady ms per event
};

/// Single-file backend: u32 BE record length ‖ event fields in canonical
/// encoding, fsync after each append. Reloads and re-verifies nothing on
/// open beyond structural parsing; run verify() for chain integrity.
class FileLedger : public Ledger {
public:
    explicit FileLedger(std::string path);

    LedgerEvent append(const std::string& topic, const Bytes& payload,
                       std::uint64_t expected_prev_seq) override;
    std::optional<LedgerEvent> latest(const std::string& topic) const override;
    VerifyResult verify() const override;
    std::uint64_t head_seq() const override;
    std::uint64_t size() const override;

    const std::string& path() const { return path_; }

private:
    void load();

    mutable std::mutex mutex_;
    std::string path_;
    std::vector<LedgerEvent> events_;
};

Bytes ledger_event_encode(const LedgerEvent& event);
LedgerEvent ledger_event_decode(ByteView data);

}  // namespace mfaz

#include "mfaz/ledger.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstring>

#include "mfaz/encoding.hpp"
#include "mfaz/errors.hpp"
#include "mfaz/sha256.hpp"
#include "mfaz/time.hpp"

namespace mfaz {

Digest ledger_event_hash(std::uint64_t seq, const std::string& topic,
                         const Bytes& payload, const Digest& prev_hash) {
    const auto seq_be = be64_bytes(seq);
    Bytes encoded = canonical_encode({
        {0x01, Bytes(seq_be.begin(), seq_be.end())},
        {0x02, to_bytes(topic)},
        {0x03, payload},
        {0x04, Bytes(prev_hash.begin(), prev_hash.end())},
    });
    return sha256(encoded);
}

namespace {

LedgerEvent build_event(std::vector<LedgerEvent>& events, const std::string& topic,
                        const Bytes& payload, std::uint64_t expected_prev_seq) {
    if (payload.empty())
        throw Error(ErrorCode::RejectPayload, "empty payload");
    std::uint64_t head = events.empty() ? 0 : events.back().seq;
    if (expected_prev_seq != head)
        throw Error(ErrorCode::Conflict, "expected prev seq " +
                                             std::to_string(expected_prev_seq) +
                                             ", head is " + std::to_string(head));
    LedgerEvent ev;
    ev.seq = head + 1;
    ev.topic = topic;
    ev.payload = payload;
    ev.prev_hash = events.empty() ? Digest{} : events.back().event_hash;
    ev.event_hash = ledger_event_hash(ev.seq, ev.topic, ev.payload, ev.prev_hash);
    ev.appended_at = system_now();
    events.push_back(ev);
    return ev;
}

std::optional<LedgerEvent> latest_of(const std::vector<LedgerEvent>& events,
                                     const std::string& topic, std::size_t limit) {
    for (std::size_t i = limit; i-- > 0;) {
        if (events[i].topic == topic) return events[i];
    }
    return std::nullopt;
}

VerifyResult verify_chain(const std::vector<LedgerEvent>& events) {
    Digest expected_prev{};
    std::uint64_t expected_seq = 1;
    for (const LedgerEvent& ev : events) {
        if (ev.seq != expected_seq || ev.prev_hash != expected_prev ||
            ledger_event_hash(ev.seq, ev.topic, ev.payload, ev.prev_hash) !=
                ev.event_hash) {
            return {false, ev.seq};
        }
        expected_prev = ev.event_hash;
        ++expected_seq;
    }
    return {true, 0};
}

}  // namespace

InMemoryLedger::InMemoryLedger(std::uint64_t visibility_delay_ms)
    : visibility_delay_ms_(visibility_delay_ms) {}

LedgerEvent InMemoryLedger::append(const std::string& topic, const Bytes& payload,
                                   std::uint64_t expected_prev_seq) {
    std::lock_guard lock(mutex_);
    LedgerEvent ev = build_event(events_, topic, payload, expected_prev_seq);
    visible_at_.push_back(steady_now_ms() + visibility_delay_ms_);
    return ev;
}

std::optional<LedgerEvent> InMemoryLedger::latest(const std::string& topic) const {
    std::lock_guard lock(mutex_);
    std::size_t limit = events_.size();
    if (visibility_delay_ms_ > 0) {
        std::uint64_t now = steady_now_ms();
        while (limit > 0 && visible_at_[limit - 1] > now) --limit;
    }
    return latest_of(events_, topic, limit);
}

VerifyResult InMemoryLedger::verify() const {
    std::lock_guard lock(mutex_);
    return verify_chain(events_);
}

std::uint64_t InMemoryLedger::head_seq() const {
    std::lock_guard lock(mutex_);
    return events_.empty() ? 0 : events_.back().seq;
}

std::uint64_t InMemoryLedger::size() const {
    std::lock_guard lock(mutex_);
    return events_.size();
}

Bytes ledger_event_encode(const LedgerEvent& event) {
    const auto seq_be = be64_bytes(event.seq);
    const auto ts_be = be64_bytes(event.appended_at.millis);
    return canonical_encode({
        {0x01, Bytes(seq_be.begin(), seq_be.end())},
        {0x02, to_bytes(event.topic)},
        {0x03, event.payload},
        {0x04, Bytes(event.prev_hash.begin(), event.prev_hash.end())},
        {0x05, Bytes(event.event_hash.begin(), event.event_hash.end())},
        {0x06, Bytes(ts_be.begin(), ts_be.end())},
    });
}

LedgerEvent ledger_event_decode(ByteView data) {
    std::vector<TlvField> fields;
    try {
        fields = canonical_decode(data);
    } catch (const Error&) {
        throw Error(ErrorCode::RejectFormat, "malformed event record");
    }
    if (fields.size() != 6 || fields[0].tag != 0x01 || fields[5].tag != 0x06 ||
        fields[0].payload.size() != 8 || fields[3].payload.size() != 32 ||
        fields[4].payload.size() != 32 || fields[5].payload.size() != 8)
        throw Error(ErrorCode::RejectFormat, "bad event field layout");

    LedgerEvent ev;
    ev.seq = read_be64(fields[0].payload.data());
    ev.topic = to_string(fields[1].payload);
    ev.payload = fields[2].payload;
    std::memcpy(ev.prev_hash.data(), fields[3].payload.data(), 32);
    std::memcpy(ev.event_hash.data(), fields[4].payload.data(), 32);
    ev.appended_at = Timestamp{read_be64(fields[5].payload.data())};
    return ev;
}

namespace {

// Decodes records until the first structurally invalid one; throws when
// structurally_ok is null (loading), otherwise stops and reports it.
std::vector<LedgerEvent> read_event_file(const std::string& path,
                                         bool* structurally_ok) {
    std::vector<LedgerEvent> events;
    if (structurally_ok) *structurally_ok = true;

    int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) return events;  // no file yet: empty ledger

    Bytes data;
    std::uint8_t chunk[4096];
    ssize_t n;
    while ((n = ::read(fd, chunk, sizeof(chunk))) > 0)
        data.insert(data.end(), chunk, chunk + n);
    ::close(fd);

    std::size_t pos = 0;
    while (pos < data.size()) {
        try {
            if (data.size() - pos < 4)
                throw Error(ErrorCode::RejectFormat, "truncated record length");
            std::uint32_t len = read_be32(data.data() + pos);
            if (data.size() - pos - 4 < len)
                throw Error(ErrorCode::RejectFormat, "truncated record");
            events.push_back(
                ledger_event_decode(ByteView(data.data() + pos + 4, len)));
            pos += 4 + len;
        } catch (const Error&) {
            if (!structurally_ok) throw;
            *structurally_ok = false;
            return events;
        }
    }
    return events;
}

}  // namespace

FileLedger::FileLedger(std::string path) : path_(std::move(path)) { load(); }

void FileLedger::load() { events_ = read_event_file(path_, nullptr); }

LedgerEvent FileLedger::append(const std::string& topic, const Bytes& payload,
                               std::uint64_t expected_prev_seq) {
    std::lock_guard lock(mutex_);
    LedgerEvent ev = build_event(events_, topic, payload, expected_prev_seq);

    Bytes record;
    Bytes encoded = ledger_event_encode(ev);
    write_be32(record, std::uint32_t(encoded.size()));
    record.insert(record.end(), encoded.begin(), encoded.end());

    int fd = ::open(path_.c_str(), O_CREAT | O_WRONLY | O_APPEND, 0600);
    if (fd < 0) {
        events_.pop_back();
        throw Error(ErrorCode::LedgerUnavailable, "cannot open " + path_);
    }
    std::size_t written = 0;
    while (written < record.size()) {
        ssize_t n = ::write(fd, record.data() + written, record.size() - written);
        if (n <= 0) {
            ::close(fd);
            events_.pop_back();
            throw Error(ErrorCode::LedgerUnavailable, "write failed on " + path_);
        }
        written += std::size_t(n);
    }
    ::fsync(fd);
    ::close(fd);
    return ev;
}

std::optional<LedgerEvent> FileLedger::latest(const std::string& topic) const {
    std::lock_guard lock(mutex_);
    return latest_of(events_, topic, events_.size());
}

VerifyResult FileLedger::verify() const {
    std::lock_guard lock(mutex_);
    // Re-read from disk so on-disk mutations are caught, not the cached copy.
    bool structurally_ok = true;
    std::vector<LedgerEvent> on_disk = read_event_file(path_, &structurally_ok);
    if (!structurally_ok) return {false, on_disk.size() + 1};
    return verify_chain(on_disk);
}

std::uint64_t FileLedger::head_seq() const {
    std::lock_guard lock(mutex_);
    return events_.empty() ? 0 : events_.back().seq;
}

std::uint64_t FileLedger::size() const {
    std::lock_guard lock(mutex_);
    return events_.size();
}

}  // namespace mfaz

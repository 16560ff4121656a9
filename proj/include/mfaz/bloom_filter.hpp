#pragma once

#include <cstdint>
#include <vector>

#include "mfaz/bytes.hpp"
#include "mfaz/core.hpp"

namespace mfaz {

/// Sizing derived from planned capacity n and target false-positive rate p:
///   m = round(n * |ln p| / (ln 2)^2),  k = max(1, round(m/n * ln 2)).
/// round() (not ceil) so the default (1000, 0.01) lands on m=9585, k=7.
struct BloomParams {
    std::uint64_t capacity_n = 0;
    double target_fpr_p = 0.0;
    std::uint64_t bit_count_m = 0;
    std::uint64_t hash_count_k = 0;

    /// Throws Error{RejectParams} unless n >= 1 and 0 < p < 1.
    static BloomParams derive(std::uint64_t capacity_n, double target_fpr_p);

    bool operator==(const BloomParams&) const = default;
};

enum class InsertResult { New, Present };
enum class Presence { Present, Absent };

/// Probabilistic set of VerificationPoints. No false negatives; the
/// false-positive rate approaches target_fpr_p at full load. Not internally
/// synchronized: inserts require exclusive access.
class BloomFilter {
public:
    static BloomFilter make(std::uint64_t capacity_n, double target_fpr_p);

    /// Probe positions for one VP: double hashing over a single SHA-256 of
    /// the digest, h1 = BE64(d[0..8)), h2 = BE64(d[8..16)) | 1 (odd step),
    /// index_i = (h1 + i*h2) mod m.
    static std::vector<std::uint64_t> probe_indices(const VerificationPoint& vp,
                                                    const BloomParams& params);

    /// Sets all k probe bits. Returns Present when every bit was already
    /// set, else New. inserted_count advances only on New.
    /// Throws Error{RejectState} if the filter's bit store is inconsistent.
    InsertResult insert(const VerificationPoint& vp);

    /// Present iff all k probe bits are set. Never Absent for an inserted VP.
    Presence check(const VerificationPoint& vp) const;

    /// Fixed 56-byte header followed by ceil(m/8) bit-array bytes; trailing
    /// pad bits are zero. 1255 bytes at default parameters.
    /// Header, all big-endian: "MFAZ" | version u32 | m u64 | k u64 | n u64 |
    /// inserted_count u64 | target_fpr in micro-units u64 | reserved u64.
    Bytes serialize() const;

    /// Throws Error{RejectFormat} on bad magic/version/length and
    /// Error{RejectParams} when header fields break the sizing invariants.
    static BloomFilter deserialize(ByteView data);

    const BloomParams& params() const { return params_; }
    std::uint64_t inserted_count() const { return inserted_count_; }

private:
    BloomFilter(BloomParams params, Bytes bits, std::uint64_t inserted_count)
        : params_(params), bits_(std::move(bits)), inserted_count_(inserted_count) {}

    BloomParams params_;
    Bytes bits_;  // byte-packed, LSB-first within a byte
    std::uint64_t inserted_count_ = 0;
};

inline constexpr std::size_t kBloomHeaderSize = 56;
inline constexpr std::uint32_t kBloomFormatVersion = 1;

}  // namespace mfaz

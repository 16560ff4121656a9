#include "mfaz/bloom_filter.hpp"

#include <cmath>
#include <cstring>

#include "mfaz/errors.hpp"
#include "mfaz/sha256.hpp"

namespace mfaz {

namespace {
constexpr char kMagic[4] = {'M', 'F', 'A', 'Z'};
constexpr double kLn2 = 0.6931471805599453;
}  // namespace

BloomParams BloomParams::derive(std::uint64_t capacity_n, double target_fpr_p) {
    if (capacity_n < 1)
        throw Error(ErrorCode::RejectParams, "capacity must be >= 1");
    if (!(target_fpr_p > 0.0) || !(target_fpr_p < 1.0))
        throw Error(ErrorCode::RejectParams, "target fpr must be in (0,1)");

    double m = std::round(double(capacity_n) * std::fabs(std::log(target_fpr_p)) /
                          (kLn2 * kLn2));
    std::uint64_t bit_count = std::uint64_t(m);
    if (bit_count == 0) bit_count = 1;
    std::uint64_t hash_count =
        std::uint64_t(std::round(double(bit_count) / double(capacity_n) * kLn2));
    if (hash_count == 0) hash_count = 1;
    return BloomParams{capacity_n, target_fpr_p, bit_count, hash_count};
}

BloomFilter BloomFilter::make(std::uint64_t capacity_n, double target_fpr_p) {
    BloomParams params = BloomParams::derive(capacity_n, target_fpr_p);
    return BloomFilter(params, Bytes((params.bit_count_m + 7) / 8, 0), 0);
}

std::vector<std::uint64_t> BloomFilter::probe_indices(const VerificationPoint& vp,
                                                      const BloomParams& params) {
    Digest d = sha256(vp.digest);
    std::uint64_t h1 = read_be64(d.data());
    std::uint64_t h2 = read_be64(d.data() + 8) | 1;

    std::vector<std::uint64_t> out;
    out.reserve(params.hash_count_k);
    for (std::uint64_t i = 0; i < params.hash_count_k; ++i) {
        // 128-bit intermediate: h1 + i*h2 must not wrap before the modulus.
        unsigned __int128 v = (unsigned __int128)h1 + (unsigned __int128)i * h2;
        out.push_back(std::uint64_t(v % params.bit_count_m));
    }
    return out;
}

InsertResult BloomFilter::insert(const VerificationPoint& vp) {
    if (bits_.size() != (params_.bit_count_m + 7) / 8)
        throw Error(ErrorCode::RejectState, "bit array size mismatch");

    bool all_set = true;
    for (std::uint64_t idx : probe_indices(vp, params_)) {
        std::uint8_t& byte = bits_[idx / 8];
        std::uint8_t mask = std::uint8_t(1u << (idx % 8));
        if (!(byte & mask)) {
            all_set = false;
            byte |= mask;
        }
    }
    if (all_set) return InsertResult::Present;
    ++inserted_count_;
    return InsertResult::New;
}

Presence BloomFilter::check(const VerificationPoint& vp) const {
    for (std::uint64_t idx : probe_indices(vp, params_)) {
        if (!(bits_[idx / 8] & (1u << (idx % 8)))) return Presence::Absent;
    }
    return Presence::Present;
}

Bytes BloomFilter::serialize() const {
    Bytes out;
    out.reserve(kBloomHeaderSize + bits_.size());
    out.insert(out.end(), kMagic, kMagic + 4);
    write_be32(out, kBloomFormatVersion);
    write_be64(out, params_.bit_count_m);
    write_be64(out, params_.hash_count_k);
    write_be64(out, params_.capacity_n);
    write_be64(out, inserted_count_);
    write_be64(out, std::uint64_t(std::llround(params_.target_fpr_p * 1e6)));
    write_be64(out, 0);  // reserved
    out.insert(out.end(), bits_.begin(), bits_.end());
    return out;
}

BloomFilter BloomFilter::deserialize(ByteView data) {
    if (data.size() < kBloomHeaderSize)
        throw Error(ErrorCode::RejectFormat, "shorter than header");
    if (std::memcmp(data.data(), kMagic, 4) != 0)
        throw Error(ErrorCode::RejectFormat, "bad magic");
    if (read_be32(data.data() + 4) != kBloomFormatVersion)
        throw Error(ErrorCode::RejectFormat, "unsupported version");

    std::uint64_t bit_count = read_be64(data.data() + 8);
    std::uint64_t hash_count = read_be64(data.data() + 16);
    std::uint64_t capacity = read_be64(data.data() + 24);
    std::uint64_t inserted = read_be64(data.data() + 32);
    std::uint64_t fpr_micro = read_be64(data.data() + 40);

    if (bit_count == 0 || fpr_micro == 0 || fpr_micro >= 1000000)
        throw Error(ErrorCode::RejectParams, "header parameters out of range");
    std::uint64_t byte_count = (bit_count + 7) / 8;
    if (data.size() != kBloomHeaderSize + byte_count)
        throw Error(ErrorCode::RejectFormat, "length does not match bit count");

    BloomParams params = BloomParams::derive(capacity, double(fpr_micro) / 1e6);
    if (params.bit_count_m != bit_count || params.hash_count_k != hash_count)
        throw Error(ErrorCode::RejectParams, "header violates sizing invariants");

    Bytes bits(data.begin() + kBloomHeaderSize, data.end());
    if (bit_count % 8 != 0) {
        std::uint8_t pad_mask = std::uint8_t(0xff << (bit_count % 8));
        if (bits.back() & pad_mask)
            throw Error(ErrorCode::RejectFormat, "nonzero pad bits");
    }
    return BloomFilter(params, std::move(bits), inserted);
}

}  // namespace mfaz

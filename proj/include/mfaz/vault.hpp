#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfaz/bytes.hpp"
#include "mfaz/core.hpp"

namespace mfaz {

/// Client-side persistent store of granted accesses. File format:
/// u32 BE count ‖ repeated (32-byte digest ‖ 8-byte issued_at BE), written
/// with atomic replace (temp file + rename) and owner-only permissions.
/// One vault belongs to one client process; not internally synchronized.
class GaVault {
public:
    /// Loads the file when it exists; otherwise starts empty.
    /// Throws Error{RejectFormat} on a malformed file.
    static GaVault open(std::string path, std::string user_id);

    /// Non-persistent vault for scripted scenarios and benchmarks.
    static GaVault in_memory(std::string user_id);

    /// Duplicate digests collapse; persists immediately.
    void insert(const GrantedAccess& ga);
    void insert_all(const std::vector<GrantedAccess>& gas);

    /// Removes used entries and rewrites storage.
    /// Throws Error{NotInVault} when any digest is absent (vault unchanged).
    void consume(const std::vector<GrantedAccess>& used);

    /// Uniform random q-subset without replacement; a supplied seed makes
    /// the draw deterministic. Throws Error{VaultEmpty} when size() < q.
    std::vector<GrantedAccess> select_sga(
        std::size_t q, std::optional<std::uint64_t> seed = std::nullopt) const;

    std::size_t size() const { return entries_.size(); }
    bool contains(const Digest& digest) const { return entries_.count(digest) > 0; }
    const std::string& user_id() const { return user_id_; }
    const std::string& path() const { return path_; }

private:
    GaVault(std::string path, std::string user_id)
        : path_(std::move(path)), user_id_(std::move(user_id)) {}

    void persist() const;

    std::string path_;
    std::string user_id_;
    std::map<Digest, Timestamp> entries_;  // keyed by digest: no duplicates
};

}  // namespace mfaz

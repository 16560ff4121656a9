#include "mfaz/vault.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <cstring>
#include <random>

#include "mfaz/errors.hpp"

namespace mfaz {

GaVault GaVault::in_memory(std::string user_id) {
    return GaVault("", std::move(user_id));
}

GaVault GaVault::open(std::string path, std::string user_id) {
    GaVault vault(std::move(path), std::move(user_id));

    int fd = ::open(vault.path_.c_str(), O_RDONLY);
    if (fd < 0) return vault;

    Bytes data;
    std::uint8_t chunk[4096];
    ssize_t n;
    while ((n = ::read(fd, chunk, sizeof(chunk))) > 0)
        data.insert(data.end(), chunk, chunk + n);
    ::close(fd);

    if (data.size() < 4)
        throw Error(ErrorCode::RejectFormat, "vault file shorter than header");
    std::uint32_t count = read_be32(data.data());
    if (data.size() != 4 + std::size_t(count) * 40)
        throw Error(ErrorCode::RejectFormat, "vault file length mismatch");

    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint8_t* p = data.data() + 4 + std::size_t(i) * 40;
        Digest digest;
        std::memcpy(digest.data(), p, 32);
        vault.entries_[digest] = Timestamp{read_be64(p + 32)};
    }
    return vault;
}

void GaVault::persist() const {
    if (path_.empty()) return;  // in-memory vault
    Bytes out;
    write_be32(out, std::uint32_t(entries_.size()));
    for (const auto& [digest, issued_at] : entries_) {
        out.insert(out.end(), digest.begin(), digest.end());
        write_be64(out, issued_at.millis);
    }

    std::string tmp = path_ + ".tmp";
    int fd = ::open(tmp.c_str(), O_CREAT | O_WRONLY | O_TRUNC, 0600);
    if (fd < 0)
        throw Error(ErrorCode::RejectState, "cannot write vault " + tmp);
    std::size_t written = 0;
    while (written < out.size()) {
        ssize_t n = ::write(fd, out.data() + written, out.size() - written);
        if (n <= 0) {
            ::close(fd);
            std::remove(tmp.c_str());
            throw Error(ErrorCode::RejectState, "vault write failed");
        }
        written += std::size_t(n);
    }
    ::fsync(fd);
    ::close(fd);
    if (std::rename(tmp.c_str(), path_.c_str()) != 0)
        throw Error(ErrorCode::RejectState, "vault rename failed");
}

void GaVault::insert(const GrantedAccess& ga) {
    entries_[ga.digest] = ga.issued_at;
    persist();
}

void GaVault::insert_all(const std::vector<GrantedAccess>& gas) {
    for (const GrantedAccess& ga : gas) entries_[ga.digest] = ga.issued_at;
    persist();
}

void GaVault::consume(const std::vector<GrantedAccess>& used) {
    for (const GrantedAccess& ga : used) {
        if (!entries_.count(ga.digest))
            throw Error(ErrorCode::NotInVault, hex_encode(ga.digest));
    }
    for (const GrantedAccess& ga : used) entries_.erase(ga.digest);
    persist();
}

std::vector<GrantedAccess> GaVault::select_sga(
    std::size_t q, std::optional<std::uint64_t> seed) const {
    if (q == 0 || entries_.size() < q)
        throw Error(ErrorCode::VaultEmpty,
                    "need " + std::to_string(q) + " entries, have " +
                        std::to_string(entries_.size()));

    std::vector<GrantedAccess> pool;
    pool.reserve(entries_.size());
    for (const auto& [digest, issued_at] : entries_)
        pool.push_back(GrantedAccess{digest, issued_at});

    std::mt19937_64 rng;
    if (seed) {
        rng.seed(*seed);
    } else {
        std::random_device rd;
        rng.seed((std::uint64_t(rd()) << 32) ^ rd());
    }

    // Partial Fisher-Yates: the first q slots are a uniform q-subset.
    for (std::size_t i = 0; i < q; ++i) {
        std::size_t j = i + std::size_t(rng() % (pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(q);
    return pool;
}

}  // namespace mfaz

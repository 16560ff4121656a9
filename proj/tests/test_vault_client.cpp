#include <doctest.h>

#include <sys/stat.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "mfaz/client.hpp"
#include "mfaz/errors.hpp"
#include "mfaz/vault.hpp"

using namespace mfaz;

namespace {

struct TempPath {
    std::string path;
    explicit TempPath(const std::string& name)
        : path("/tmp/mfaz_vault_" + name + "_" + std::to_string(::getpid())) {
        std::remove(path.c_str());
    }
    ~TempPath() {
        std::remove(path.c_str());
        std::remove((path + ".tmp").c_str());
    }
};

GrantedAccess ga_numbered(std::uint64_t n) {
    GrantedAccess ga;
    for (int i = 0; i < 8; ++i)
        ga.digest[i] = std::uint8_t(n >> (8 * (7 - i)));
    ga.issued_at = Timestamp{n};
    return ga;
}

struct ServerFixture {
    InMemoryLedger ledger;
    AuthzServer server{ledger};
    InProcessChannel channel{server};

    ServerFixture() {
        RuleSet rules =
            parse_rules_text("alice;read,write;sensor1\n*;read;public\n");
        ruleset_store(rules, ledger);
    }
};

}  // namespace

TEST_CASE("selecting the whole vault returns every entry") {
    GaVault vault = GaVault::in_memory("u");
    for (std::uint64_t i = 0; i < 3; ++i) vault.insert(ga_numbered(i));

    auto picked = vault.select_sga(3, 1);
    CHECK(picked.size() == 3);
    std::set<Digest> digests;
    for (const auto& ga : picked) digests.insert(ga.digest);
    CHECK(digests.size() == 3);
}

TEST_CASE("asking for more than stored is VAULT_EMPTY") {
    GaVault vault = GaVault::in_memory("u");
    vault.insert(ga_numbered(1));
    try {
        vault.select_sga(2);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::VaultEmpty);
    }
}

TEST_CASE("seeded selection is reproducible") {
    GaVault vault = GaVault::in_memory("u");
    for (std::uint64_t i = 0; i < 10; ++i) vault.insert(ga_numbered(i));
    auto a = vault.select_sga(2, 42);
    auto b = vault.select_sga(2, 42);
    REQUIRE(a.size() == b.size());
    CHECK(a[0].digest == b[0].digest);
    CHECK(a[1].digest == b[1].digest);
}

TEST_CASE("pair selection over 10^4 seeded draws is uniform") {
    GaVault vault = GaVault::in_memory("u");
    for (std::uint64_t i = 0; i < 10; ++i) vault.insert(ga_numbered(i));

    std::map<std::pair<Digest, Digest>, int> counts;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        auto picked = vault.select_sga(2, std::uint64_t(i));
        std::pair<Digest, Digest> key =
            picked[0].digest < picked[1].digest
                ? std::make_pair(picked[0].digest, picked[1].digest)
                : std::make_pair(picked[1].digest, picked[0].digest);
        ++counts[key];
    }
    CHECK(counts.size() == 45);  // C(10,2)

    // each pair within 3 sigma of uniform, plus a chi-square bound
    const double p = 1.0 / 45.0;
    const double expected = draws * p;
    const double sigma = std::sqrt(draws * p * (1 - p));
    double chi2 = 0;
    for (const auto& [pair, count] : counts) {
        CHECK(std::fabs(count - expected) <= 3 * sigma);
        chi2 += (count - expected) * (count - expected) / expected;
    }
    // 44 dof, 99.9th percentile is ~78.7
    CHECK(chi2 < 78.7);
}

TEST_CASE("consume removes entries and survives reopen") {
    TempPath tmp("consume");
    {
        GaVault vault = GaVault::open(tmp.path, "u");
        for (std::uint64_t i = 0; i < 3; ++i) vault.insert(ga_numbered(i));
        vault.consume({ga_numbered(1)});
        CHECK(vault.size() == 2);
        CHECK(!vault.contains(ga_numbered(1).digest));
    }
    GaVault reopened = GaVault::open(tmp.path, "u");
    CHECK(reopened.size() == 2);
    CHECK(reopened.contains(ga_numbered(0).digest));
    CHECK(!reopened.contains(ga_numbered(1).digest));
    CHECK(reopened.contains(ga_numbered(2).digest));
}

TEST_CASE("consuming the only entry empties the vault") {
    GaVault vault = GaVault::in_memory("u");
    vault.insert(ga_numbered(7));
    vault.consume({ga_numbered(7)});
    CHECK(vault.size() == 0);
}

TEST_CASE("consuming an unknown digest fails and changes nothing") {
    GaVault vault = GaVault::in_memory("u");
    vault.insert(ga_numbered(1));
    try {
        vault.consume({ga_numbered(1), ga_numbered(2)});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotInVault);
    }
    CHECK(vault.size() == 1);  // nothing was removed
}

TEST_CASE("vault file is owner-only and duplicates collapse") {
    TempPath tmp("perms");
    GaVault vault = GaVault::open(tmp.path, "u");
    vault.insert(ga_numbered(5));
    vault.insert(ga_numbered(5));
    CHECK(vault.size() == 1);

    struct stat st{};
    REQUIRE(::stat(tmp.path.c_str(), &st) == 0);
    CHECK((st.st_mode & 0777) == 0600);
    // atomic replace leaves no temp file behind
    CHECK(::access((tmp.path + ".tmp").c_str(), F_OK) != 0);
}

TEST_CASE("malformed vault files are rejected") {
    TempPath tmp("malformed");
    {
        std::FILE* f = std::fopen(tmp.path.c_str(), "wb");
        const char junk[] = {0, 0, 0, 2, 1, 2, 3};  // claims 2 entries
        std::fwrite(junk, 1, sizeof(junk), f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(GaVault::open(tmp.path, "u"), Error);
}

TEST_CASE("end-to-end: first grant keeps vault size constant at q=1") {
    ServerFixture fx;
    GaVault vault = GaVault::in_memory("alice");
    AuthKey key{"alice-key", {}};
    key.key_bytes.fill(3);
    ClientAgent agent(UserAttr{"alice", "alice-key", ""}, key, vault,
                      fx.channel);

    agent.enroll();
    CHECK(vault.size() == 3);  // bootstrap_count default
    agent.open_session();

    AccessDecision d = agent.request_access(
        Operation::Read, {"sensor1", ResourceClass::Private}, 1);
    CHECK(d.verdict == Verdict::Granted);
    CHECK(vault.size() == 3);  // consumed one, regenerated one
}

TEST_CASE("a chain of ten grants never empties the vault") {
    ServerFixture fx;
    GaVault vault = GaVault::in_memory("alice");
    AuthKey key{"alice-key", {}};
    key.key_bytes.fill(4);
    ClientAgent agent(UserAttr{"alice", "alice-key", ""}, key, vault,
                      fx.channel);
    agent.enroll();
    agent.open_session();

    std::set<Digest> sent;  // single-use check over the granted chain
    for (int i = 0; i < 10; ++i) {
        std::size_t before = vault.size();
        auto picked = vault.select_sga(1, std::uint64_t(i));
        // peek what the agent would send: re-seed for the same draw
        AccessDecision d = agent.request_access(
            Operation::Read, {"sensor1", ResourceClass::Private}, 1,
            std::uint64_t(i));
        CHECK(d.verdict == Verdict::Granted);
        CHECK(vault.size() == before);
        CHECK(sent.insert(picked[0].digest).second);  // never reused
    }
}

TEST_CASE("a denial consumes nothing") {
    ServerFixture fx;
    GaVault vault = GaVault::in_memory("alice");
    AuthKey key{"alice-key", {}};
    key.key_bytes.fill(5);
    ClientAgent agent(UserAttr{"alice", "alice-key", ""}, key, vault,
                      fx.channel);
    agent.enroll();
    agent.open_session();

    std::set<Digest> before;
    for (std::uint64_t i = 0; i < 3; ++i)
        for (const auto& ga : vault.select_sga(3, i)) before.insert(ga.digest);

    AccessDecision d = agent.request_access(
        Operation::Execute, {"sensor1", ResourceClass::Private}, 1);
    CHECK(d.verdict == Verdict::Denied);
    CHECK(d.reason == Reason::ArFail);
    CHECK(vault.size() == 3);
    for (const auto& ga : vault.select_sga(3, 0))
        CHECK(before.count(ga.digest));
}

TEST_CASE("request without a session is refused client-side") {
    ServerFixture fx;
    GaVault vault = GaVault::in_memory("alice");
    AuthKey key{"alice-key", {}};
    ClientAgent agent(UserAttr{"alice", "alice-key", ""}, key, vault,
                      fx.channel);
    agent.enroll();
    CHECK_THROWS_AS(
        agent.request_access(Operation::Read, {"sensor1", ResourceClass::Private}),
        Error);
}

#include <doctest.h>

#include <fstream>
#include <random>

#include <json.hpp>

#include "mfaz/core.hpp"
#include "mfaz/errors.hpp"
#include "mfaz/sha256.hpp"

using namespace mfaz;
using nlohmann::json;

namespace {

json load_vectors() {
    std::ifstream in(std::string(MFAZ_VECTORS_DIR) + "/core_crypto.json");
    REQUIRE(in.good());
    json j;
    in >> j;
    return j;
}

Digest digest_from_hex(const std::string& hex) {
    Bytes raw = hex_decode(hex);
    REQUIRE(raw.size() == 32);
    Digest d;
    std::copy(raw.begin(), raw.end(), d.begin());
    return d;
}

}  // namespace

TEST_CASE("sha256 matches frozen reference digests") {
    json vectors = load_vectors();
    for (const auto& rec : vectors["sha256"]) {
        Bytes input = hex_decode(rec["input"].get<std::string>());
        CHECK(hex_encode(sha256(input)) == rec["expected_digest"].get<std::string>());
    }
}

TEST_CASE("sha256 streaming equals one-shot across split points") {
    Bytes data(300);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::uint8_t(i * 7);
    Digest whole = sha256(data);
    for (std::size_t split : {std::size_t(1), std::size_t(63), std::size_t(64),
                              std::size_t(65), std::size_t(299)}) {
        Sha256 h;
        h.update(ByteView(data.data(), split));
        h.update(ByteView(data.data() + split, data.size() - split));
        CHECK(h.finalize() == whole);
    }
}

TEST_CASE("gen_ga reproduces the frozen golden vectors") {
    json vectors = load_vectors();
    for (const auto& rec : vectors["gen_ga"]) {
        UserAttr user{rec["user_id"].get<std::string>(),
                      rec["key_id"].get<std::string>(), ""};
        auto op = operation_from_name(rec["op"].get<std::string>());
        auto rc = resource_class_from_name(rec["resource_class"].get<std::string>());
        REQUIRE(op);
        REQUIRE(rc);
        ResourceAttr resource{rec["resource_id"].get<std::string>(), *rc};
        Timestamp ts{rec["ts_millis"].get<std::uint64_t>()};

        GrantedAccess ga = gen_ga(user, *op, resource, ts);
        CHECK(ga.digest ==
              digest_from_hex(rec["expected_digest"].get<std::string>()));
        CHECK(ga.issued_at == ts);
    }
}

TEST_CASE("gen_vp reproduces the frozen golden vectors") {
    json vectors = load_vectors();
    for (const auto& rec : vectors["gen_vp"]) {
        GrantedAccess ga{digest_from_hex(rec["ga_digest"].get<std::string>()),
                         Timestamp{}};
        AuthKey key;
        key.key_id = "k";
        Bytes kb = hex_decode(rec["key_bytes"].get<std::string>());
        REQUIRE(kb.size() == 32);
        std::copy(kb.begin(), kb.end(), key.key_bytes.begin());

        CHECK(gen_vp(ga, key).digest ==
              digest_from_hex(rec["expected_digest"].get<std::string>()));
    }
}

TEST_CASE("gen_ga is deterministic and timestamp-sensitive") {
    UserAttr user{"u1", "k1", ""};
    ResourceAttr resource{"r1", ResourceClass::Private};

    GrantedAccess a = gen_ga(user, Operation::Read, resource, Timestamp{1234});
    GrantedAccess b = gen_ga(user, Operation::Read, resource, Timestamp{1234});
    CHECK(a.digest == b.digest);

    GrantedAccess c = gen_ga(user, Operation::Read, resource, Timestamp{1235});
    CHECK(a.digest != c.digest);
}

TEST_CASE("gen_vp separates keys") {
    GrantedAccess ga{{}, Timestamp{}};
    AuthKey k1{"k1", {}};
    AuthKey k2{"k2", {}};
    k2.key_bytes[31] = 1;
    CHECK(gen_vp(ga, k1).digest != gen_vp(ga, k2).digest);
}

TEST_CASE("avalanche: single-byte input flips always change the digest") {
    std::mt19937_64 rng(2024);
    UserAttr user{"avalanche-user", "avalanche-key", ""};
    ResourceAttr resource{"resource/42", ResourceClass::Public};
    Timestamp ts{1699999999999};
    Digest base_ga = gen_ga(user, Operation::Write, resource, ts).digest;

    int changed = 0;
    for (int trial = 0; trial < 100; ++trial) {
        UserAttr u = user;
        ResourceAttr r = resource;
        Timestamp t = ts;
        // flip one random byte of one input
        switch (rng() % 3) {
            case 0: {
                std::size_t i = rng() % u.user_id.size();
                u.user_id[i] = char(u.user_id[i] ^ (1 + rng() % 255));
                break;
            }
            case 1: {
                std::size_t i = rng() % r.resource_id.size();
                r.resource_id[i] = char(r.resource_id[i] ^ (1 + rng() % 255));
                break;
            }
            default:
                t.millis ^= std::uint64_t(1) << (rng() % 64);
        }
        if (gen_ga(u, Operation::Write, r, t).digest != base_ga) ++changed;
    }
    CHECK(changed == 100);

    AuthKey key{"k", {}};
    Digest base_vp = gen_vp(GrantedAccess{base_ga, ts}, key).digest;
    changed = 0;
    for (int trial = 0; trial < 100; ++trial) {
        AuthKey k = key;
        k.key_bytes[rng() % 32] ^= std::uint8_t(1 + rng() % 255);
        if (gen_vp(GrantedAccess{base_ga, ts}, k).digest != base_vp) ++changed;
    }
    CHECK(changed == 100);
}

TEST_CASE("attribute invariants are enforced") {
    ResourceAttr ok{"r", ResourceClass::Private};
    CHECK_THROWS_AS(gen_ga(UserAttr{"", "k", ""}, Operation::Read, ok, Timestamp{}),
                    Error);
    CHECK_THROWS_AS(gen_ga(UserAttr{std::string(257, 'x'), "k", ""},
                           Operation::Read, ok, Timestamp{}),
                    Error);
    CHECK_THROWS_AS(gen_ga(UserAttr{"u", "k", ""}, Operation::Read,
                           ResourceAttr{"", ResourceClass::Public}, Timestamp{}),
                    Error);
}

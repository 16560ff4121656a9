#include <doctest.h>

#include <set>

#include "mfaz/encoding.hpp"
#include "mfaz/errors.hpp"

using namespace mfaz;

TEST_CASE("single empty-payload field encodes to tag + zero length") {
    Bytes out = canonical_encode({{0x01, {}}});
    CHECK(out == Bytes{0x01, 0x00, 0x00, 0x00, 0x00});
}

TEST_CASE("two one-byte fields produce the documented layout") {
    Bytes out = canonical_encode({{0x01, to_bytes("A")}, {0x02, to_bytes("B")}});
    CHECK(out == Bytes{0x01, 0x00, 0x00, 0x00, 0x01, 0x41,
                       0x02, 0x00, 0x00, 0x00, 0x01, 0x42});
}

TEST_CASE("tags must strictly ascend") {
    CHECK_THROWS_WITH_AS(canonical_encode({{0x02, {}}, {0x01, {}}}),
                         doctest::Contains("ascending"), Error);
    CHECK_THROWS_AS(canonical_encode({{0x01, {}}, {0x01, {}}}), Error);
    try {
        canonical_encode({{0x03, {}}, {0x03, {}}});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RejectEncoding);
    }
}

TEST_CASE("exhaustive injectivity: <=2 fields, payloads <=3 bytes") {
    // All payloads over a 3-symbol alphabet up to length 3, all tag choices
    // from {1,2,3}: every well-formed field list encodes uniquely.
    const std::vector<std::uint8_t> alphabet = {0x00, 0x01, 0xff};
    std::vector<Bytes> payloads{{}};
    for (std::size_t len = 1; len <= 3; ++len) {
        std::size_t start = payloads.size();
        (void)start;
        std::vector<Bytes> next;
        for (const Bytes& p : payloads) {
            if (p.size() != len - 1) continue;
            for (std::uint8_t c : alphabet) {
                Bytes q = p;
                q.push_back(c);
                next.push_back(q);
            }
        }
        payloads.insert(payloads.end(), next.begin(), next.end());
    }
    REQUIRE(payloads.size() == 1 + 3 + 9 + 27);

    std::set<Bytes> seen;
    std::size_t lists = 0;
    for (std::uint8_t tag : {1, 2, 3}) {
        for (const Bytes& p : payloads) {
            CHECK(seen.insert(canonical_encode({{tag, p}})).second);
            ++lists;
        }
    }
    for (std::uint8_t t1 : {1, 2, 3}) {
        for (std::uint8_t t2 : {1, 2, 3}) {
            if (t2 <= t1) continue;
            for (const Bytes& p1 : payloads) {
                for (const Bytes& p2 : payloads) {
                    CHECK(seen.insert(canonical_encode({{t1, p1}, {t2, p2}}))
                              .second);
                    ++lists;
                }
            }
        }
    }
    CHECK(lists == 3 * 40 + 3 * 40 * 40);
    CHECK(seen.size() == lists);
}

TEST_CASE("decode inverts encode") {
    std::vector<TlvField> fields = {
        {0x01, to_bytes("alice")}, {0x05, {}}, {0x09, Bytes(300, 0xab)}};
    auto round = canonical_decode(canonical_encode(fields));
    REQUIRE(round.size() == fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        CHECK(round[i].tag == fields[i].tag);
        CHECK(round[i].payload == fields[i].payload);
    }
}

TEST_CASE("decode rejects truncation and bad tag order") {
    Bytes good = canonical_encode({{0x01, to_bytes("xy")}});
    Bytes truncated(good.begin(), good.end() - 1);
    CHECK_THROWS_AS(canonical_decode(truncated), Error);

    Bytes descending = canonical_encode({{0x02, {}}});
    Bytes second = canonical_encode({{0x01, {}}});
    descending.insert(descending.end(), second.begin(), second.end());
    CHECK_THROWS_AS(canonical_decode(descending), Error);
}

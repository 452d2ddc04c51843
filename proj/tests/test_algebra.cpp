#include "doctest.h"

#include "adc/algebra.hpp"
#include "oracles.hpp"

using namespace adc;

namespace {

void check_associative(const MonoidTable& m) {
    for (Element a = 0; a < m.size(); ++a)
        for (Element b = 0; b < m.size(); ++b)
            for (Element c = 0; c < m.size(); ++c) REQUIRE(m.mul(m.mul(a, b), c) == m.mul(a, m.mul(b, c)));
}

}  // namespace

TEST_CASE("U1 table is a monoid with identity 1 and idempotent 0") {
    auto u = make_u1();
    CHECK(u->size() == 2);
    CHECK(u->element_name(u->identity()) == "1");
    Element zero = u->element("0");
    CHECK(u->mul(zero, zero) == zero);
    CHECK(u->mul(zero, u->identity()) == zero);
    CHECK(u->is_u1());
    CHECK_FALSE(u->is_group());
    CHECK(u->arity() == 1);
}

TEST_CASE("trivial monoid from a 1x1 table") {
    auto m = make_monoid("T", {"e"}, "e", {{"e"}});
    CHECK(m->size() == 1);
    CHECK(m->arity() == 0);
    CHECK(m->is_group());
}

TEST_CASE("malformed tables are rejected") {
    // a*b = b except a*a = b, b*a = a: (a a) a = b a = a but a (a a) = a b = b.
    try {
        make_monoid("X", {"a", "b"}, "a", {{"b", "b"}, {"a", "b"}});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK((e.code() == Errc::NotAssociative || e.code() == Errc::NoIdentity));
    }
    // Left-zero semigroup: associative, no identity.
    try {
        make_monoid("L", {"a", "b"}, "a", {{"a", "a"}, {"b", "b"}});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NoIdentity);
    }
    // Right-zero pattern with a 3-cycle breaks associativity while keeping identity e.
    try {
        make_monoid("N", {"e", "a", "b"}, "e", {{"e", "a", "b"}, {"a", "b", "a"}, {"b", "b", "b"}});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotAssociative);
    }
}

TEST_CASE("cyclic groups") {
    auto c2 = make_cyclic(2);
    Element g = c2->element("g");
    CHECK(c2->mul(g, g) == c2->identity());
    CHECK(c2->mul(g, c2->identity()) == g);
    CHECK(make_cyclic(1)->size() == 1);
    auto c3 = make_cyclic(3);
    CHECK(c3->mul(c3->element("g"), c3->element("g2")) == c3->identity());
    CHECK(c3->arity() == 2);
    CHECK(c3->inverse(c3->element("g")) == c3->element("g2"));
}

TEST_CASE("symmetric groups") {
    auto s3 = make_symmetric(3);
    CHECK(s3->size() == 6);
    CHECK(s3->is_group());
    bool commutative = true;
    for (Element a = 0; a < 6; ++a)
        for (Element b = 0; b < 6; ++b) commutative = commutative && s3->mul(a, b) == s3->mul(b, a);
    CHECK_FALSE(commutative);
    CHECK(make_symmetric(5)->size() == 120);
    auto s2 = make_symmetric(2);
    auto c2 = make_cyclic(2);
    CHECK(divides(*s2, *c2));
    CHECK(divides(*c2, *s2));
}

TEST_CASE("S3 multiplication agrees with permutation composition") {
    auto s3 = make_symmetric(3);
    for (Element a = 0; a < 6; ++a) {
        for (Element b = 0; b < 6; ++b) {
            auto expect = oracle::compose(oracle::perm_of(s3->element_name(a)), oracle::perm_of(s3->element_name(b)));
            CHECK(oracle::perm_of(s3->element_name(s3->mul(a, b))) == expect);
        }
    }
}

TEST_CASE("products of sequences") {
    auto c2 = make_cyclic(2);
    Element g = c2->element("g");
    CHECK(product(*c2, {g, g}) == c2->identity());
    CHECK(product(*c2, {}) == c2->identity());
    auto s3 = make_symmetric(3);
    CHECK(s3->element_name(product(*s3, {s3->element("(12)"), s3->element("(23)")})) == "(123)");
    CHECK(s3->element_name(product(*s3, {s3->element("(23)"), s3->element("(12)")})) == "(132)");
}

TEST_CASE("division") {
    auto c2 = make_cyclic(2);
    auto s3 = make_symmetric(3);
    auto u1 = make_u1();
    CHECK(divides(*c2, *s3));
    CHECK(divides(*s3, *s3));
    CHECK(divides(*u1, *u1));
    CHECK_FALSE(divides(*u1, *c2));
    CHECK_FALSE(divides(*make_cyclic(3), *c2));
}

TEST_CASE("every builtin table is associative and powers match repeated products") {
    for (auto name : {"U1", "C1", "C2", "C3", "C4", "C6", "S2", "S3"}) {
        CAPTURE(name);
        auto m = builtin_monoid(name);
        check_associative(*m);
        for (Element a = 0; a < m->size(); ++a) {
            Element acc = m->identity();
            for (int k = 0; k <= 13; ++k) {
                CHECK(m->power(a, k) == acc);
                acc = m->mul(acc, a);
            }
            if (m->is_group()) CHECK(m->mul(a, m->inverse(a)) == m->identity());
        }
        // The ordering lists each non-identity element once.
        std::vector<Element> ord = m->ordering();
        std::sort(ord.begin(), ord.end());
        CHECK(std::adjacent_find(ord.begin(), ord.end()) == ord.end());
        CHECK(static_cast<int>(ord.size()) == m->size() - 1);
        CHECK(std::find(ord.begin(), ord.end(), m->identity()) == ord.end());
    }
}

TEST_CASE("index and period bound the power sequence") {
    for (auto name : {"U1", "C3", "S3"}) {
        auto m = builtin_monoid(name);
        for (Element a = 0; a < m->size(); ++a) {
            CHECK(m->power(a, m->max_index()) == m->power(a, m->max_index() + m->period_lcm()));
        }
    }
    CHECK(builtin_monoid("S3")->period_lcm() == 6);
    CHECK(builtin_monoid("U1")->period_lcm() == 1);
}

TEST_CASE("orders of elements") {
    auto s3 = make_symmetric(3);
    CHECK(order_of(*s3, s3->identity()) == 1);
    CHECK(order_of(*s3, s3->element("(12)")) == 2);
    CHECK(order_of(*s3, s3->element("(123)")) == 3);
}

TEST_CASE("monoids load from json and resolve through the registry") {
    auto m = monoid_from_json(R"({"name":"Z2","elements":["e","t"],"identity":"e",
                                  "table":[["e","t"],["t","e"]]})",
                              "fallback");
    CHECK(m->name() == "Z2");
    CHECK(m->is_group());
    MonoidRegistry reg;
    reg.add(m);
    CHECK(reg.resolve("Z2") == m);
    CHECK(reg.resolve("C3")->size() == 3);
    CHECK_THROWS_AS(reg.resolve("Q8"), Error);
    CHECK_THROWS_AS(monoid_from_json("{\"elements\": 3}", "x"), Error);
    CHECK_THROWS_AS(make_u1()->element("2"), Error);
}

TEST_CASE("custom ordering is kept") {
    auto c3 = make_monoid("C3r", {"1", "g", "g2"}, "1", {{"1", "g", "g2"}, {"g", "g2", "1"}, {"g2", "1", "g"}},
                          {"g2", "g"});
    CHECK(c3->ordering()[0] == c3->element("g2"));
    CHECK(c3->ordering()[1] == c3->element("g"));
}

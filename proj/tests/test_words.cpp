#include "doctest.h"

#include <random>

#include "adc/words.hpp"

using namespace adc;

TEST_CASE("letter lookup") {
    WordModel w('_', {{5, 'a'}});
    CHECK(w.letter_at(5) == 'a');
    CHECK(w.letter_at(6) == '_');
    CHECK(WordModel('_').letter_at(0) == '_');
    CHECK(w.is_neutral_at(0));
    CHECK_FALSE(w.is_neutral_at(5));
    CHECK_FALSE(w.is_neutral_at(-1));
    CHECK(w.nnp() == std::vector<Value>{5});
    CHECK(w.max_support() == 5);
}

TEST_CASE("neutral insertion and deletion") {
    WordModel w('_', {{5, 'a'}, {7, 'b'}});
    CHECK(insert_neutral(w, 6) == WordModel('_', {{5, 'a'}, {8, 'b'}}));
    CHECK(delete_neutral(insert_neutral(w, 6), 6) == w);
    CHECK(insert_neutral(WordModel('_', {{0, 'a'}}), 0) == WordModel('_', {{1, 'a'}}));
    CHECK_THROWS_AS(delete_neutral(w, 5), Error);
}

TEST_CASE("insert then delete is the identity on random words") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 500; ++t) {
        WordModel w('_');
        int n = static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) w.set(static_cast<Value>(rng() % 30), "ab"[rng() % 2]);
        Value at = static_cast<Value>(rng() % 35);
        auto v = insert_neutral(w, at);
        CHECK(delete_neutral(v, at) == w);
        CHECK(v.letter_sequence() == w.letter_sequence());
        CHECK(v.nnp().size() == w.nnp().size());
    }
}

TEST_CASE("sampled words live in D_r") {
    DomainDr d{5, 6};
    CHECK(d.elements() == std::vector<Value>{5, 25, 125, 625, 3125, 15625});
    CHECK(d.contains(625));
    CHECK_FALSE(d.contains(1));
    CHECK_FALSE(d.contains(50));
    auto alpha = Alphabet::of("ab", '_');
    auto w = sample_word(d, alpha, 3, 42);
    CHECK(w.nnp().size() == 3);
    for (Value p : w.nnp()) CHECK(d.contains(p));
    CHECK(sample_word(d, alpha, 0, 42).support().empty());
    CHECK(sample_word(d, alpha, 3, 42) == w);
    CHECK_THROWS_AS(sample_word(d, alpha, 7, 1), Error);
}

TEST_CASE("order-preserving embedding") {
    CHECK(embed_order_preserving(WordModel('_', {{0, 'a'}, {1, 'b'}}), {5, 25}) ==
          WordModel('_', {{5, 'a'}, {25, 'b'}}));
    CHECK(embed_order_preserving(WordModel('_'), {5}).support().empty());
    CHECK(embed_order_preserving(WordModel('_', {{2, 'a'}}), {625}) == WordModel('_', {{625, 'a'}}));
    CHECK_THROWS_AS(embed_order_preserving(WordModel('_', {{0, 'a'}, {1, 'a'}}), {5}), Error);
}

TEST_CASE("word text forms") {
    auto w = parse_word("neutral=_; w={5:a,25:b}");
    CHECK(w == WordModel('_', {{5, 'a'}, {25, 'b'}}));
    CHECK(parse_word(format_word(w)) == w);
    auto d = parse_word("..a.b", '_');
    CHECK(d == WordModel('_', {{2, 'a'}, {4, 'b'}}));
    CHECK(parse_word("0110", '0') == WordModel('0', {{1, '1'}, {2, '1'}}));
    CHECK(w.letter_sequence() == "ab");
}

#include "doctest.h"

#include <random>

#include "adc/harness.hpp"
#include "adc/syntax.hpp"
#include "oracles.hpp"

using namespace adc;

namespace {

WordModel word(std::map<Value, char> m) { return WordModel('_', std::move(m)); }

}  // namespace

TEST_CASE("linear terms") {
    auto t = parse_term("2*x + y - x + 3");
    CHECK(t.coeff(var("x")) == 1);
    CHECK(t.coeff(var("y")) == 1);
    CHECK(t.constant_part() == 3);
    CHECK((t - t).is_constant());
    CHECK(t.substitute(var("x"), parse_term("y + 1")) == parse_term("2*y + 4"));
    CHECK(parse_term("x + x") == parse_term("2*x"));
    CHECK(LinearTerm::variable(var("z")).is_bare_variable());
    CHECK_FALSE(parse_term("z + 0 + 1").is_bare_variable());
}

TEST_CASE("parity quantifier parses") {
    auto f = parse("Q{C2,1} z . < '1'(z) >");
    REQUIRE(f->kind() == Kind::Quant);
    CHECK(f->monoid()->name() == "C2");
    CHECK(f->monoid()->element_name(f->target()) == "1");
    CHECK(f->bodies().size() == 1);
    CHECK(f->bodies()[0]->kind() == Kind::Letter);
    CHECK(f->bodies()[0]->letter() == '1');
    CHECK(f->free_vars().empty());
}

TEST_CASE("existential sugar is the U1 quantifier with target 0") {
    auto f = parse("E z . 'a'(z)");
    REQUIRE(f->kind() == Kind::Quant);
    CHECK(f->monoid()->is_u1());
    CHECK(f->monoid()->element_name(f->target()) == "0");
    CHECK(structurally_equal(f, parse("Q{U1,0} z . < 'a'(z) >")));
}

TEST_CASE("parse errors") {
    auto code_of = [](const char* text) {
        try {
            parse(text);
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::InvalidArgument;
    };
    CHECK(code_of("Q{C3,g} z . < 'a'(z) >") == Errc::ArityMismatch);
    CHECK(code_of("Q{C2,1} z . <") == Errc::SyntaxError);
    CHECK(code_of("Q{Q8,1} z . < 'a'(z) >") == Errc::UnknownMonoid);
    CHECK(code_of("Q{C2,h} z . < 'a'(z) >") == Errc::UnknownElement);
    try {
        parse("x < < y");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.pos() > 0);
    }
}

TEST_CASE("guards") {
    auto w = word({{3, 'a'}});
    auto g = parse("Q{C2,g} z [!'_'(z)] . < 'a'(z) >");
    CHECK(oracle::eval(g, w, {}, 10));
    CHECK(eval_finite(g, w, {}, 10));
    // A true guard changes nothing.
    CHECK(eval_finite(parse("Q{C2,g} z [true] . < 'a'(z) >"), w, {}, 10));
    // A false guard makes every position contribute the identity.
    auto off = parse("Q{C2,1} z [false] . < 'a'(z) >");
    CHECK(eval_finite(off, w, {}, 10));
    CHECK(oracle::eval(off, w, {}, 10));
}

TEST_CASE("active-domain recognition") {
    CHECK(is_active_domain(parse("x < y & 'a'(x)"), '_'));
    CHECK_FALSE(is_active_domain(parse("Q{U1,0} x . < 'a'(x) >"), '_'));
    CHECK(is_active_domain(parse("Q{U1,0} x [!'_'(x)] . < 'a'(x) >"), '_'));
    CHECK_FALSE(is_active_domain(parse("Q{U1,0} x [!'_'(x)] . < Q{C2,1} y . < y < x > >"), '_'));
    auto rel = relativize(parse("Q{U1,0} x . < Q{C2,1} y . < y < x > >"), '_');
    CHECK(is_active_domain(rel, '_'));
}

TEST_CASE("normalization of a doubled pivot") {
    const VarId z = var("z");
    auto nb = normalize_bodies({parse("z + z < x")}, z, LetterTrick{'_', make_cyclic(2)});
    CHECK(nb.divisor == 2);
    CHECK(nb.pivot == z);
    // Every atom on z is in normal form, and z now reads as 2z.
    bool all_normal = true;
    for_each_node(nb.bodies[0], [&](const FormulaPtr& a) {
        if (a->is_numeric_atom() && a->mentions_free(z)) all_normal = all_normal && is_normalized_atom(*a, z);
    });
    CHECK(all_normal);
    const VarId x = var("x");
    for (Value zv = 0; zv < 12; ++zv) {
        for (Value xv = 0; xv < 12; ++xv) {
            Assignment lhs{{z, zv}, {x, xv}};
            bool expect = zv % 2 == 0 && zv < xv;
            CHECK(oracle::eval(nb.bodies[0], WordModel('_'), lhs, 1) == expect);
        }
    }
}

TEST_CASE("normalization leaves z-free bodies alone") {
    auto b = parse("x < y + 1 & 'a'(x)");
    auto nb = normalize_bodies({b}, var("z"), LetterTrick{'_', make_cyclic(2)});
    CHECK(nb.divisor == 1);
    CHECK(structurally_equal(nb.bodies[0], b));
}

TEST_CASE("letters on the pivot go through an active-domain quantifier") {
    const VarId z = var("z");
    auto c2 = make_cyclic(2);
    auto nb = normalize_bodies({parse("'a'(z)")}, z, LetterTrick{'_', c2});
    auto f = nb.bodies[0];
    REQUIRE(f->kind() == Kind::Quant);
    CHECK(f->monoid() == c2);
    CHECK(f->target() == c2->ordering()[0]);
    CHECK(is_active_domain(f, '_'));
    auto w = word({{2, 'a'}, {5, 'b'}});
    for (Value p = 0; p < 8; ++p) CHECK(oracle::eval(f, w, {{z, p}}, 10) == (p == 2));
}

TEST_CASE("compound letter positions are rewritten") {
    auto f = rewrite_compound_letters(parse("'a'(x + 1)"), LetterTrick{'_', make_cyclic(2)});
    CHECK(f->kind() == Kind::Quant);
    auto w = word({{4, 'a'}});
    for (Value x = 0; x < 7; ++x) CHECK(oracle::eval(f, w, {{var("x"), x}}, 10) == (x == 3));
}

TEST_CASE("substitution avoids capture") {
    auto f = parse("Q{U1,0} y . < x < y >");
    auto g = substitute(f, var("x"), parse_term("y + 1"));
    // exists y' > y + 1, false for every y when the horizon is y + 2.
    for (Value y = 0; y < 5; ++y) {
        CHECK_FALSE(oracle::eval(g, WordModel('_'), {{var("y"), y}}, y + 2));
        CHECK(oracle::eval(g, WordModel('_'), {{var("y"), y}}, y + 3));
    }
    // Bound occurrences of the substituted variable are left alone.
    auto h = parse("Q{U1,0} x . < x = 3 >");
    CHECK(structurally_equal(substitute(h, var("x"), parse_term("7")), h));
}

TEST_CASE("substitution keeps sharing across nested quantifiers") {
    const VarId z = var("z");
    FormulaPtr f = f_less(LinearTerm::variable(z), LinearTerm::variable(var("x")));
    for (int i = 0; i < 40; ++i) {
        VarId v = var("s" + std::to_string(i));
        auto g = f_not(f_letter('_', LinearTerm::variable(v)));
        auto q1 = f_quant(make_cyclic(2), 0, v, g, {f_and(f, f_less(LinearTerm::variable(v), LinearTerm::variable(z)))});
        auto q2 = f_quant(make_cyclic(2), 1, v, g, {f_and(f, f_greater(LinearTerm::variable(v), LinearTerm::variable(z)))});
        f = f_or(q1, q2);
    }
    CHECK(tree_size(f) > 1000000);
    auto g = substitute(f, z, parse_term("y + 2"));
    CHECK(dag_size(g) <= dag_size(f) + 10);
    CHECK_FALSE(g->mentions_free(z));
}

TEST_CASE("printing round-trips on random formulas") {
    std::mt19937_64 rng(11);
    CorpusConfig cfg;
    for (int i = 0; i < 300; ++i) {
        auto f = random_formula(rng, cfg);
        auto text = print(f);
        CAPTURE(text);
        auto g = parse(text);
        CHECK(structurally_equal(f, g));
        CHECK(print(g) == text);
    }
}

TEST_CASE("builders fold constants") {
    CHECK(f_and(f_true(), f_false())->kind() == Kind::False);
    CHECK(f_or(f_true(), f_false())->kind() == Kind::True);
    CHECK(f_not(f_not(f_letter('a', LinearTerm::variable(var("x")))))->kind() == Kind::Letter);
    CHECK(f_less(parse_term("x + 1"), parse_term("x + 3"))->kind() == Kind::True);
    CHECK(f_cong(2, parse_term("x"), parse_term("x + 4"))->kind() == Kind::True);
    CHECK(quantifier_depth(parse("Q{U1,0} x . < Q{C2,1} y . < y < x > >")) == 2);
}

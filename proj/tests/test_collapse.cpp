#include "doctest.h"

#include <random>

#include "adc/collapse.hpp"
#include "adc/harness.hpp"
#include "oracles.hpp"

using namespace adc;

namespace {

struct Prepared {
    MonoidPtr G;
    std::vector<FormulaPtr> bodies;
    CollapseContext ctx;
};

Prepared prepare(const MonoidPtr& G, const std::vector<const char*>& bodies, char neutral = '_',
                 FamilyKind family = FamilyKind::Merged) {
    const VarId z = var("z");
    std::vector<FormulaPtr> parsed;
    for (auto b : bodies) parsed.push_back(parse(b));
    auto nb = normalize_bodies(parsed, z, LetterTrick{neutral, G});
    std::vector<VarId> free;
    for (auto& b : nb.bodies) {
        for (VarId v : b->free_vars()) {
            if (v != z && std::find(free.begin(), free.end(), v) == free.end()) free.push_back(v);
        }
    }
    std::sort(free.begin(), free.end());
    ParamOptions opts;
    opts.family = family;
    return {G, nb.bodies, collapse_params(nb.bodies, z, free, G->size(), 2, opts)};
}

std::size_t zero_offset(const CollapseContext& ctx) {
    for (std::size_t i = 0; i < ctx.T.size(); ++i) {
        if (ctx.T[i] == LinearTerm()) return i;
    }
    FAIL("no zero offset");
    return 0;
}

// The unique element whose indicator formula holds.
std::optional<Element> selected(const std::vector<FormulaPtr>& fs, const WordModel& w, const Assignment& a) {
    std::optional<Element> out;
    for (std::size_t g = 0; g < fs.size(); ++g) {
        if (eval_exact(fs[g], w, a)) {
            if (out) return std::nullopt;
            out = static_cast<Element>(g);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("parity of ones collapses") {
    WordModel w('0', {{5, '1'}, {25, '1'}});
    CollapseOptions opts;
    opts.neutral = '0';
    auto even = collapse(parse("Q{C2,1} z . < '1'(z) >"), opts);
    auto odd = collapse(parse("Q{C2,g} z . < '1'(z) >"), opts);
    CHECK(is_active_domain(even.formula, '0'));
    CHECK(eval_exact(even.formula, w, {}));
    CHECK_FALSE(eval_exact(odd.formula, w, {}));
    CHECK(eval_exact(even.formula, WordModel('0'), {}));
    CHECK_FALSE(eval_exact(odd.formula, WordModel('0'), {}));
    WordModel three('0', {{5, '1'}, {25, '1'}, {125, '1'}});
    CHECK_FALSE(eval_exact(even.formula, three, {}));
    CHECK(eval_exact(odd.formula, three, {}));
}

TEST_CASE("S3 quantifier with order-sensitive letters") {
    auto s3 = make_symmetric(3);
    const auto& ord = s3->ordering();
    std::vector<FormulaPtr> bodies(ord.size(), f_false());
    const VarId z = var("z");
    auto pos = [&](const char* name) {
        return static_cast<std::size_t>(std::find(ord.begin(), ord.end(), s3->element(name)) - ord.begin());
    };
    bodies[pos("(12)")] = f_letter('a', LinearTerm::variable(z));
    bodies[pos("(23)")] = f_letter('b', LinearTerm::variable(z));
    auto phi = f_quant(s3, s3->element("(123)"), z, f_true(), bodies);
    auto c = collapse(phi);
    CHECK(is_active_domain(c.formula, '_'));
    std::mt19937_64 rng(1);
    int hits = 0;
    for (int t = 0; t < 100; ++t) {
        DomainDr d{c.threshold + static_cast<Value>(t % 2), 4};
        auto w = sample_word(d, Alphabet::of("ab", '_'), 1 + static_cast<int>(rng() % 4), rng());
        bool expect = oracle::eval(phi, w, {}, w.max_support() + 1);
        hits += expect;
        CHECK(eval_exact(c.formula, w, {}) == expect);
    }
    // (12)(23) = (123) occurs; (23)(12) does not.
    CHECK(hits > 0);
    CHECK(eval_exact(c.formula, WordModel('_', {{16, 'a'}, {64, 'b'}}), {}));
    CHECK_FALSE(eval_exact(c.formula, WordModel('_', {{16, 'b'}, {64, 'a'}}), {}));
}

TEST_CASE("existential witnesses") {
    auto c = collapse(parse("E z . 'a'(z)"));
    CHECK(eval_exact(c.formula, WordModel('_', {{25, 'a'}}), {}));
    CHECK_FALSE(eval_exact(c.formula, WordModel('_'), {}));
    CHECK_FALSE(eval_exact(c.formula, WordModel('_', {{25, 'b'}}), {}));
    auto tail = collapse(parse("E z . ('_'(z) & z =mod 2 1 & z > x1)"));
    for (Value x : {0, 5, 25, 125}) CHECK(eval_exact(tail.formula, WordModel('_', {{25, 'a'}}), {{var("x1"), x}}));
}

TEST_CASE("quantifier-free formulas and negation") {
    auto qf = parse("x < y & 'a'(x) | x + 1 = y");
    CHECK(structurally_equal(collapse(qf).formula, qf));
    auto inner = parse("Q{C2,1} z . < (z < x & 'a'(z)) >");
    auto a = collapse(inner);
    auto b = collapse(f_not(inner));
    CHECK(a.threshold == b.threshold);
    for (Value x : {0, 5, 6, 25, 26, 125}) {
        for (auto& w : {WordModel('_'), WordModel('_', {{5, 'a'}}), WordModel('_', {{5, 'a'}, {25, 'a'}}),
                        WordModel('_', {{5, 'b'}, {25, 'a'}, {125, 'a'}})}) {
            CHECK(eval_exact(b.formula, w, {{var("x"), x}}) == !eval_exact(a.formula, w, {{var("x"), x}}));
        }
    }
}

TEST_CASE("delta detects a second boundary point at the given distance") {
    auto P = prepare(make_cyclic(2), {"'a'(z)"}, '_', FamilyKind::Full);
    REQUIRE(P.ctx.s == 1);
    GroupCollapser gc(P.G, P.G->identity(), P.bodies, P.ctx, '_');
    const ExtFunction x1{{1}, zero_offset(P.ctx)};
    WordModel w('_', {{5, 'a'}, {25, 'b'}});
    Assignment a{{gc.params(0)[0], 5}};
    CHECK(eval_exact(gc.delta(20, x1, 0), w, a));
    CHECK_FALSE(eval_exact(gc.delta(1, x1, 0), w, a));
    // 5 - 5 = 0 is a boundary point through the bare offset.
    CHECK(eval_exact(gc.delta(-5, x1, 0), w, a));
    CHECK_FALSE(eval_exact(gc.delta(-6, x1, 0), w, a));
}

TEST_CASE("chains read products of consecutive positions") {
    auto P = prepare(make_cyclic(2), {"'a'(z)"});
    GroupCollapser gc(P.G, P.G->identity(), P.bodies, P.ctx, '_');
    const ExtFunction x1{{1}, zero_offset(P.ctx)};
    WordModel w('_', {{16, 'a'}, {17, 'a'}, {64, 'a'}});
    Assignment a{{gc.params(0)[0], 16}};
    // Positions 16 and 17 both hold a: g g = 1.
    auto two = gc.pi(x1, 0, 0, 2);
    CHECK(selected(two, w, a) == P.G->identity());
    auto one = gc.pi(x1, 0, 0, 1);
    CHECK(selected(one, w, a) == P.G->element("g"));
    auto empty = gc.pi(x1, 0, 0, 0);
    CHECK(selected(empty, w, a) == P.G->identity());
}

TEST_CASE("nu at level zero matches the brute-force N_0") {
    std::mt19937_64 rng(6);
    for (const char* G : {"C2", "C3", "S3"}) {
        auto M = builtin_monoid(G);
        std::vector<const char*> bodies(static_cast<std::size_t>(M->arity()), "false");
        bodies[0] = "'a'(z)";
        if (bodies.size() > 1) bodies[1] = "('b'(z) | z =mod 2 1)";
        auto P = prepare(M, bodies);
        GroupCollapser gc(P.G, P.G->identity(), P.bodies, P.ctx, '_');
        const ExtFunction x1{{1}, zero_offset(P.ctx)};
        const VarId v = gc.params(0)[0];
        for (int t = 0; t < 12; ++t) {
            DomainDr d{P.ctx.rphi, 4};
            auto w = sample_word(d, Alphabet::of("ab", '_'), 1 + static_cast<int>(rng() % 4), rng());
            for (Value b : w.nnp()) {
                Assignment a{{v, b}};
                auto n = selected(gc.nu(0, x1, 0, false), w, a);
                auto nh = selected(gc.nu(0, x1, 0, true), w, a);
                REQUIRE(n.has_value());
                REQUIRE(nh.has_value());
                CHECK(*n == nk_oracle(w, {}, 0, b, P.ctx, P.bodies, *M));
                CHECK(*nh == nkhat_oracle(w, {}, 0, b, P.ctx, P.bodies, *M));
            }
        }
    }
}

TEST_CASE("tail substitution") {
    const VarId z = var("z");
    const VarId x = var("x");
    auto body = parse("(z > x & 'a'(x)) | z < x | z = x | z =mod 2 x");
    auto t1 = tail_substitute(body, z, 1);
    for (Value xv = 0; xv < 6; ++xv) {
        // Tail positions lie above x: only 'a'(x) and the residue test survive.
        CHECK(oracle::eval(t1, WordModel('_'), {{x, xv}}, 1) == (xv % 2 == 1));
        CHECK(oracle::eval(t1, WordModel('_', {{xv, 'a'}}), {{x, xv}}, 1));
        CHECK(oracle::eval(tail_substitute(parse("z < x | z =mod 2 x"), z, 0), WordModel('_'), {{x, xv}}, 1) ==
              (xv % 2 == 0));
    }
    CHECK_FALSE(t1->mentions_free(z));
}

TEST_CASE("precondition errors") {
    auto P = prepare(make_cyclic(2), {"'a'(z)"});
    auto code = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::InvalidArgument;
    };
    CHECK(code([&] { GroupCollapser(P.G, 0, {parse("Q{U1,0} y . < y < z >")}, P.ctx, '_'); }) ==
          Errc::BodiesNotActiveDomain);
    CHECK(code([&] { GroupCollapser(make_u1(), 0, P.bodies, P.ctx, '_'); }) == Errc::NotAGroup);
    CHECK(code([&] { collapse_group_quant(parse("E z . 'a'(z)")); }) == Errc::NotAGroup);
    CHECK(code([&] { collapse_u1_quant(parse("Q{C2,1} z . < 'a'(z) >")); }) == Errc::UnsupportedMonoid);
    ParamOptions tight;
    tight.max_p = 2;
    CollapseOptions o;
    o.params = tight;
    CHECK(code([&] { collapse(parse("Q{C2,1} z . < z =mod 3 0 >"), o); }) == Errc::SizeCap);
}

TEST_CASE("trace names the formula families") {
    CollapseOptions o;
    o.trace = true;
    auto c = collapse(parse("Q{C2,1} z . < (z < x & 'a'(z)) >"), o);
    auto has = [&](const std::string& prefix) {
        return std::any_of(c.trace.begin(), c.trace.end(), [&](auto& e) { return e.first.rfind(prefix, 0) == 0; });
    };
    CHECK(has("delta["));
    CHECK(has("nu["));
    CHECK(has("nuhat["));
    CHECK(has("Gamma["));
    CHECK(has("psihat["));
    CHECK(collapse(parse("E z . 'a'(z)"), o).trace.front().first.rfind("u1witness", 0) == 0);
}

TEST_CASE("nested unguarded quantifiers are eliminated") {
    auto phi = parse("Q{C2,1} z . < ('a'(z) & E y . (y = z + z + 1 | ('b'(y) & y > z))) >");
    auto c = collapse(phi);
    CHECK(is_active_domain(c.formula, '_'));
    SamplerConfig sc;
    sc.radices = {c.threshold, c.threshold + 1};
    sc.samples_per_r = 60;
    sc.max_exp = 4;
    auto rep = equivalence_check(phi, c.formula, sc);
    CHECK(rep.total == 120);
    CHECK(rep.failures() == 0);
    CHECK(rep.nonconvergent == 0);
}

TEST_CASE("small random corpus collapses soundly under both families") {
    for (FamilyKind fam : {FamilyKind::Merged, FamilyKind::Full}) {
        CorpusConfig cc;
        cc.seed = 31;
        cc.count = 6;
        cc.max_depth = 1;
        cc.params.family = fam;
        for (auto& e : generate_corpus(cc)) {
            CAPTURE(print(e.formula));
            SamplerConfig sc;
            sc.radices = {e.collapsed.threshold};
            sc.samples_per_r = 40;
            auto rep = equivalence_check(e.formula, e.collapsed.formula, sc);
            CHECK(rep.failures() == 0);
            CHECK(rep.rhs_nonconvergent == 0);
        }
    }
}

#include "doctest.h"

#include <random>
#include <set>

#include "adc/sorting_tree.hpp"
#include "adc/words.hpp"
#include "oracles.hpp"

using namespace adc;

namespace {

const TreeParams kThreePoint{2, 2, 5, true};

const TreeNode* find_node(const TreeNode& n, const std::vector<Value>& coeffs, const std::vector<Value>& assignment) {
    if (!n.leaf && n.coeffs == coeffs && n.assignment == assignment) return &n;
    for (auto& c : n.children) {
        if (auto hit = find_node(*c, coeffs, assignment)) return hit;
    }
    return nullptr;
}

std::set<Value> nonnegative(const std::vector<Value>& v) {
    std::set<Value> out;
    for (Value x : v) {
        if (x >= 0) out.insert(x);
    }
    return out;
}

}  // namespace

TEST_CASE("three-point instance: right children of the root") {
    auto root = build_tree(0, {5, 25, 625}, kThreePoint);
    std::vector<std::pair<Value, Value>> right;
    bool past_mid = false;
    for (auto& c : root->children) {
        if (c->leaf) {
            past_mid = true;
            CHECK(c->value() == 0);
            continue;
        }
        if (past_mid) right.emplace_back(c->coeffs.at(0), c->assignment.at(0));
    }
    std::vector<std::pair<Value, Value>> expect{{1, 5}, {2, 5}, {1, 25}, {2, 25}, {1, 625}, {2, 625}};
    CHECK(right == expect);
}

TEST_CASE("three-point instance: x - 2y at x = 625, y = 25 has value 575") {
    auto root = build_tree(0, {5, 25, 625}, kThreePoint);
    auto n = find_node(*root, {1, -2}, {625, 25});
    REQUIRE(n != nullptr);
    CHECK(n->value() == 575);
    auto seq = leaves(*root);
    CHECK(std::find(seq.begin(), seq.end(), 575) != seq.end());
    CHECK(render_tree(*root).find("575") != std::string::npos);
}

TEST_CASE("three-point instance: leaves are sorted and enumerate B_t") {
    auto root = build_tree(0, {5, 25, 625}, kThreePoint);
    auto seq = leaves(*root);
    CHECK(std::is_sorted(seq.begin(), seq.end()));
    CHECK(nonnegative(seq) == oracle::boundary_values({5, 25, 625}, 2, 2, 0));
    CHECK(check_neighbor_separation(*root));
    CHECK(check_child_bounds(*root, kThreePoint));
}

TEST_CASE("three-point instance: children of (x, 625) stay within 625 +- 2*125") {
    auto root = build_tree(0, {5, 25, 625}, kThreePoint);
    auto n = find_node(*root, {1}, {625});
    REQUIRE(n != nullptr);
    for (auto& c : n->children) {
        CHECK(c->value() >= 625 - 250);
        CHECK(c->value() <= 625 + 250);
    }
}

TEST_CASE("degenerate trees") {
    auto empty = build_tree(7, {}, TreeParams{1, 1, 4, false});
    REQUIRE(empty->children.size() == 1);
    CHECK(empty->children[0]->leaf);
    CHECK(empty->children[0]->value() == 7);
    CHECK(leaves(*empty) == std::vector<Value>{7});
    auto single = build_tree(0, {5}, TreeParams{1, 1, 5, false});
    CHECK(nonnegative(leaves(*single)) == std::set<Value>{0, 5});
    CHECK(check_child_bounds(*single, TreeParams{1, 1, 5, false}));
    CHECK_THROWS_AS(build_tree(0, {5}, TreeParams{1, 1, 3, false}), Error);
    CHECK_THROWS_AS(build_tree(0, {5}, TreeParams{2, 2, 4, true}), Error);
}

TEST_CASE("random trees over D_r with r > 3 s delta") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 150; ++t) {
        TreeParams p;
        p.s = 1 + static_cast<int>(rng() % 3);
        p.delta = 1 + static_cast<Value>(rng() % 2);
        p.r = 3 * p.s * p.delta + 1 + static_cast<Value>(rng() % 3);
        auto dom = DomainDr{p.r, 4}.elements();
        std::vector<Value> nnp;
        for (Value x : dom) {
            if (rng() % 2) nnp.push_back(x);
        }
        const Value off = static_cast<Value>(rng() % (3 * p.r));
        CAPTURE(p.s);
        CAPTURE(static_cast<long long>(p.delta));
        CAPTURE(static_cast<long long>(p.r));
        auto root = build_tree(off, nnp, p);
        auto seq = leaves(*root);
        CHECK(std::is_sorted(seq.begin(), seq.end()));
        CHECK(std::adjacent_find(seq.begin(), seq.end()) == seq.end());
        CHECK(nonnegative(seq) == oracle::boundary_values(nnp, p.s, p.delta, off));
        CHECK(check_child_bounds(*root, p));
        CHECK(check_neighbor_separation(*root));
        CHECK(tree_depth(*root) <= static_cast<std::size_t>(p.s) + 2);
    }
}

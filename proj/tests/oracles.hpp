#pragma once

// Brute-force references for the tests. They read the AST and the monoid tables but
// share no evaluation, enumeration or ordering code with the library.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <tuple>
#include <set>
#include <string>
#include <vector>

#include "adc/algebra.hpp"
#include "adc/semantics.hpp"
#include "adc/syntax.hpp"

namespace oracle {

using adc::Assignment;
using adc::Element;
using adc::FormulaPtr;
using adc::Kind;
using adc::LinearTerm;
using adc::Value;

// Permutation of {1,2,3} from cycle notation: "1", "(12)", "(123)".
inline std::array<int, 4> perm_of(const std::string& name) {
    std::array<int, 4> p{0, 1, 2, 3};
    if (name == "1") return p;
    std::vector<int> cyc;
    for (char c : name) {
        if (c >= '1' && c <= '9') cyc.push_back(c - '0');
    }
    for (std::size_t i = 0; i < cyc.size(); ++i) p[cyc[i]] = cyc[(i + 1) % cyc.size()];
    return p;
}

// (a b)(x) = a(b(x)).
inline std::array<int, 4> compose(const std::array<int, 4>& a, const std::array<int, 4>& b) {
    std::array<int, 4> out{0, 0, 0, 0};
    for (int x = 1; x <= 3; ++x) out[x] = a[b[x]];
    return out;
}

inline Value term_value(const LinearTerm& t, const Assignment& env) {
    Value v = t.constant_part();
    for (auto& [x, c] : t.terms()) v += c * env.at(x);
    return v;
}

inline Value floor_mod(Value a, Value m) {
    Value r = a % m;
    return r < 0 ? r + m : r;
}

// Direct reading of the semantics over the finite prefix [0, H): no memo, no shortcuts.
inline bool eval(const FormulaPtr& f, const std::map<Value, char>& support, char neutral, Assignment& env, Value H) {
    auto letter = [&](Value p) {
        auto it = support.find(p);
        return it == support.end() ? neutral : it->second;
    };
    switch (f->kind()) {
        case Kind::True:
            return true;
        case Kind::False:
            return false;
        case Kind::Letter: {
            Value p = term_value(f->lhs(), env);
            return p >= 0 && letter(p) == f->letter();
        }
        case Kind::Less:
            return term_value(f->lhs(), env) < term_value(f->rhs(), env);
        case Kind::Greater:
            return term_value(f->lhs(), env) > term_value(f->rhs(), env);
        case Kind::Eq:
            return term_value(f->lhs(), env) == term_value(f->rhs(), env);
        case Kind::Cong:
            return floor_mod(term_value(f->rhs(), env) - term_value(f->lhs(), env), f->modulus()) == 0;
        case Kind::Not:
            return !eval(f->children()[0], support, neutral, env, H);
        case Kind::And:
            for (auto& k : f->children()) {
                if (!eval(k, support, neutral, env, H)) return false;
            }
            return true;
        case Kind::Or:
            for (auto& k : f->children()) {
                if (eval(k, support, neutral, env, H)) return true;
            }
            return false;
        case Kind::Quant: {
            const auto& M = *f->monoid();
            const adc::VarId x = f->bound_var();
            auto saved = env.find(x) == env.end() ? std::optional<Value>() : std::optional<Value>(env[x]);
            Element acc = M.identity();
            for (Value i = 0; i < H; ++i) {
                env[x] = i;
                Element u = M.identity();
                if (eval(f->guard(), support, neutral, env, H)) {
                    for (std::size_t j = 0; j < f->bodies().size(); ++j) {
                        if (eval(f->bodies()[j], support, neutral, env, H)) {
                            u = M.ordering()[j];
                            break;
                        }
                    }
                }
                acc = M.mul(acc, u);
            }
            if (saved) {
                env[x] = *saved;
            } else {
                env.erase(x);
            }
            return acc == f->target();
        }
    }
    return false;
}

inline bool eval(const FormulaPtr& f, const adc::WordModel& w, const Assignment& a, Value H) {
    Assignment env = a;
    return eval(f, w.support(), w.neutral(), env, H);
}

// Non-negative values of sum c_i d_i + offset over d_1 > ... > d_l drawn from nnp,
// every coefficient in [-delta, delta] minus 0, l <= s.
inline std::set<Value> boundary_values(const std::vector<Value>& nnp, int s, Value delta, Value offset) {
    std::set<Value> out;
    std::vector<Value> desc(nnp.begin(), nnp.end());
    std::sort(desc.rbegin(), desc.rend());
    // Depth-first over (next index into desc, remaining length, partial sum).
    std::vector<std::tuple<std::size_t, int, Value>> stack{{0, s, offset}};
    while (!stack.empty()) {
        auto [from, left, sum] = stack.back();
        stack.pop_back();
        if (sum >= 0) out.insert(sum);
        if (left == 0) continue;
        for (std::size_t i = from; i < desc.size(); ++i) {
            for (Value c = -delta; c <= delta; ++c) {
                if (c != 0) stack.emplace_back(i + 1, left - 1, sum + c * desc[i]);
            }
        }
    }
    return out;
}

// Left-to-right product of u over [from, to).
template <class U>
Element product_range(const adc::MonoidTable& M, U&& u, Value from, Value to) {
    Element acc = M.identity();
    for (Value i = from; i < to; ++i) acc = M.mul(acc, u(i));
    return acc;
}

// Truth of `atom` over every tuple of Y^k, grouped by the weak order type of the tuple.
inline bool homogeneous(const FormulaPtr& atom, const std::vector<Value>& Y) {
    std::vector<adc::VarId> vars = atom->free_vars();
    const std::size_t k = vars.size();
    std::map<std::vector<int>, bool> seen;
    std::vector<std::size_t> idx(k, 0);
    for (;;) {
        Assignment a;
        std::vector<Value> vals;
        for (std::size_t i = 0; i < k; ++i) {
            a[vars[i]] = Y[idx[i]];
            vals.push_back(Y[idx[i]]);
        }
        std::vector<Value> sorted = vals;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        std::vector<int> type;
        for (Value v : vals) type.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin()));
        bool truth = eval(atom, std::map<Value, char>{}, '_', a, 0);
        auto [it, fresh] = seen.emplace(type, truth);
        if (!fresh && it->second != truth) return false;
        std::size_t i = 0;
        while (i < k && ++idx[i] == Y.size()) idx[i++] = 0;
        if (i == k) break;
    }
    return true;
}

}  // namespace oracle

#include "adc/boundary.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace adc {

std::size_t CollapseContext::family_size() const {
    std::size_t n = 0;
    for (auto& f : F) n += f.size();
    return n;
}

namespace {

void collect_z_atoms(const FormulaPtr& f, VarId z, std::vector<FormulaPtr>& out) {
    for_each_node(f, [&](const FormulaPtr& x) {
        if (x->is_numeric_atom() && x->mentions_free(z)) out.push_back(x);
    });
}

bool term_less(const LinearTerm& a, const LinearTerm& b) {
    if (a.constant_part() != b.constant_part()) return a.constant_part() < b.constant_part();
    std::vector<std::pair<std::string, Value>> ka, kb;
    for (auto& [v, c] : a.terms()) ka.push_back({var_name(v), c});
    for (auto& [v, c] : b.terms()) kb.push_back({var_name(v), c});
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    return ka < kb;
}

}  // namespace

std::vector<ExtFunction> extended_functions(int s, Value delta, std::size_t offset) {
    std::vector<ExtFunction> out{{{}, offset}};
    if (delta == 0) return out;
    std::vector<std::vector<Value>> layer{{}};
    for (int len = 1; len <= s; ++len) {
        std::vector<std::vector<Value>> next;
        for (auto& prefix : layer) {
            for (Value a = -delta; a <= delta; ++a) {
                if (a == 0) continue;
                auto c = prefix;
                c.push_back(a);
                next.push_back(c);
            }
        }
        for (auto& c : next) out.push_back({c, offset});
        layer = std::move(next);
    }
    return out;
}

std::vector<std::vector<Value>> merged_coefficients(const std::vector<Value>& coeffs) {
    const std::size_t n = coeffs.size();
    std::set<std::vector<Value>> out;
    if (n == 0) return {{}};
    // rank[i]: block of variable i; block 0 holds the largest value.
    std::vector<std::size_t> rank(n, 0);
    for (;;) {
        std::size_t blocks = *std::max_element(rank.begin(), rank.end()) + 1;
        std::vector<bool> used(blocks, false);
        for (auto r : rank) used[r] = true;
        if (std::all_of(used.begin(), used.end(), [](bool b) { return b; })) {
            std::vector<Value> beta(blocks, 0);
            for (std::size_t i = 0; i < n; ++i) beta[rank[i]] += coeffs[i];
            std::vector<Value> nz;
            for (Value b : beta) {
                if (b != 0) nz.push_back(b);
            }
            out.insert(nz);
        }
        std::size_t i = 0;
        while (i < n && ++rank[i] == n) rank[i++] = 0;
        if (i == n) break;
    }
    return {out.begin(), out.end()};
}

CollapseContext collapse_params(const std::vector<FormulaPtr>& bodies, VarId z, const std::vector<VarId>& free_vars,
                                int group_order, Value sub_threshold, const ParamOptions& options) {
    CollapseContext ctx;
    ctx.pivot = z;
    ctx.free_vars = free_vars;
    std::sort(ctx.free_vars.begin(), ctx.free_vars.end());
    ctx.group_order = group_order;
    std::vector<FormulaPtr> atoms;
    for (auto& b : bodies) collect_z_atoms(b, z, atoms);
    auto is_free = [&](VarId v) { return std::binary_search(ctx.free_vars.begin(), ctx.free_vars.end(), v); };
    std::vector<LinearTerm> offsets{LinearTerm()};
    std::vector<std::pair<LinearTerm, std::vector<Value>>> shapes;
    for (auto& a : atoms) {
        if (!is_normalized_atom(*a, z)) throw Error(Errc::InvalidArgument, "body atom not normalized: " + print(a));
        const LinearTerm& rho = a->rhs();
        if (a->kind() == Kind::Cong) ctx.q = lcm_value(ctx.q, a->modulus());
        if (std::find(ctx.R.begin(), ctx.R.end(), rho) == ctx.R.end()) ctx.R.push_back(rho);
        LinearTerm t = LinearTerm::constant(rho.constant_part());
        std::vector<Value> bound;
        for (auto& [v, c] : rho.terms()) {
            if (is_free(v)) {
                t = t + LinearTerm::variable(v, c);
            } else {
                bound.push_back(c);
                ctx.alpha_prime = std::max(ctx.alpha_prime, abs_value(c));
            }
        }
        ctx.s = std::max(ctx.s, static_cast<int>(bound.size()));
        if (std::find(offsets.begin(), offsets.end(), t) == offsets.end()) offsets.push_back(t);
        shapes.emplace_back(t, std::move(bound));
    }
    std::sort(offsets.begin(), offsets.end(), term_less);
    ctx.T = offsets;
    ctx.delta = ctx.s * ctx.alpha_prime;
    ctx.p = checked_mul(ctx.q, group_order);
    ctx.rphi = std::max<Value>({3 * ctx.s * ctx.delta + 1, 2, sub_threshold});
    if (ctx.s > options.max_s) throw Error(Errc::SizeCap, "s = " + std::to_string(ctx.s) + " exceeds the cap");
    if (group_order > options.max_group) throw Error(Errc::SizeCap, "group order exceeds the cap");
    if (ctx.p > options.max_p) throw Error(Errc::SizeCap, "p = " + to_string(ctx.p) + " exceeds the cap");
    if (options.family == FamilyKind::Full) {
        for (std::size_t k = 0; k < ctx.T.size(); ++k) ctx.F.push_back(extended_functions(ctx.s, ctx.delta, k));
    } else {
        std::vector<std::set<std::vector<Value>>> fam(ctx.T.size(), std::set<std::vector<Value>>{{}});
        for (auto& [t, bound] : shapes) {
            auto k = static_cast<std::size_t>(std::find(ctx.T.begin(), ctx.T.end(), t) - ctx.T.begin());
            for (auto& beta : merged_coefficients(bound)) {
                for (std::size_t len = 1; len <= beta.size(); ++len) fam[k].insert({beta.begin(), beta.begin() + len});
            }
        }
        for (std::size_t k = 0; k < ctx.T.size(); ++k) {
            std::vector<ExtFunction> fs;
            for (auto& c : fam[k]) fs.push_back({c, k});
            std::sort(fs.begin(), fs.end(), [](const ExtFunction& a, const ExtFunction& b) {
                return a.coeffs.size() != b.coeffs.size() ? a.coeffs.size() < b.coeffs.size() : a.coeffs < b.coeffs;
            });
            ctx.F.push_back(std::move(fs));
        }
    }
    ctx.max_work = options.max_work;
    if (ctx.family_size() > options.max_family) {
        throw Error(Errc::SizeCap, "function family of size " + std::to_string(ctx.family_size()) + " exceeds the cap");
    }
    return ctx;
}

LinearTerm instantiate(const ExtFunction& f, const std::vector<VarId>& xs, const CollapseContext& ctx) {
    LinearTerm t = ctx.T.at(f.offset);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) t = t + LinearTerm::variable(xs.at(i), f.coeffs[i]);
    return t;
}

Value offset_value(const CollapseContext& ctx, std::size_t k, const Assignment& a) {
    const LinearTerm& t = ctx.T.at(k);
    Value v = t.constant_part();
    for (auto& [x, c] : t.terms()) {
        auto it = a.find(x);
        if (it == a.end()) throw Error(Errc::InvalidArgument, "unassigned free variable " + var_name(x));
        v = checked_add(v, checked_mul(c, it->second));
    }
    return v;
}

BoundarySet::BoundarySet(std::vector<std::vector<Value>> per_offset) : per_offset_(std::move(per_offset)) {
    for (auto& bt : per_offset_) {
        bt.erase(std::remove_if(bt.begin(), bt.end(), [](Value v) { return v < 0; }), bt.end());
        std::sort(bt.begin(), bt.end());
        bt.erase(std::unique(bt.begin(), bt.end()), bt.end());
        points_.insert(points_.end(), bt.begin(), bt.end());
    }
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
}

bool BoundarySet::contains(Value x) const { return std::binary_search(points_.begin(), points_.end(), x); }

bool BoundarySet::offset_contains(std::size_t k, Value x) const {
    const auto& bt = per_offset_.at(k);
    return std::binary_search(bt.begin(), bt.end(), x);
}

std::size_t BoundarySet::index_of(Value b) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), b);
    if (it == points_.end() || *it != b) throw Error(Errc::NotBoundaryPoint, to_string(b) + " is not a boundary point");
    return static_cast<std::size_t>(it - points_.begin());
}

std::size_t BoundarySet::interval_of(Value x) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), x);
    auto i = static_cast<std::size_t>(it - points_.begin());
    if (it != points_.end() && *it == x) return 2 * i + 1;
    return 2 * i;
}

Value BoundarySet::il(Value b) const {
    auto i = index_of(b);
    Value left = i == 0 ? -1 : points_[i - 1];
    return b - left - 1;
}

std::optional<Value> BoundarySet::ir(Value b) const {
    auto i = index_of(b);
    if (i + 1 == points_.size()) return std::nullopt;
    return points_[i + 1] - b - 1;
}

BoundarySet boundary_points(const WordModel& w, const Assignment& a, const CollapseContext& ctx) {
    const auto nnp = w.nnp();
    std::vector<std::vector<Value>> per;
    for (std::size_t k = 0; k < ctx.T.size(); ++k) {
        const Value t = offset_value(ctx, k, a);
        std::vector<Value> vals;
        for (const auto& f : ctx.F[k]) {
            const std::size_t len = f.coeffs.size();
            if (len > nnp.size()) continue;
            // Strictly decreasing tuples: choose index sets i_1 > i_2 > ... in nnp.
            std::vector<std::size_t> idx(len);
            std::function<void(std::size_t, std::size_t, Value)> go = [&](std::size_t pos, std::size_t below, Value acc) {
                if (pos == len) {
                    if (acc >= 0) vals.push_back(acc);
                    return;
                }
                for (std::size_t i = below; i-- > 0;) {
                    go(pos + 1, i, checked_add(acc, checked_mul(f.coeffs[pos], nnp[i])));
                }
            };
            go(0, nnp.size(), t);
        }
        per.push_back(std::move(vals));
    }
    return BoundarySet(std::move(per));
}

// ---------------------------------------------------------------------------

NkOracle::NkOracle(const BoundarySet& B, const MonoidTable& G, std::function<Element(Value)> u, Value p,
                   bool disjoint_levels)
    : B_(B), G_(G), u_(std::move(u)), p_(p), disjoint_(disjoint_levels) {
    if (!G.is_group()) throw Error(Errc::NotAGroup, G.name() + " is not a group");
}

Element NkOracle::u(Value i) {
    auto it = u_memo_.find(i);
    if (it != u_memo_.end()) return it->second;
    Element e = u_(i);
    u_memo_[i] = e;
    return e;
}

Element NkOracle::range(Value from, Value to) {
    Element acc = G_.identity();
    for (Value i = from; i <= to; ++i) acc = G_.mul(acc, u(i));
    return acc;
}

Element NkOracle::n(int k, Value b) {
    if (!B_.contains(b)) throw Error(Errc::NotBoundaryPoint, to_string(b) + " is not a boundary point");
    auto key = std::make_pair(k, b);
    if (auto it = n_memo_.find(key); it != n_memo_.end()) return it->second;
    Element out;
    if (k == 0) {
        auto ir = B_.ir(b);
        if (ir && *ir < p_) {
            out = range(b + 1, b + *ir);
        } else {
            out = range(b + 1, b + mod_floor(-b, p_));
        }
    } else {
        out = n(k - 1, b);
        for (Value c : B_.per_offset()[static_cast<std::size_t>(k - 1)]) {
            if (c <= b) continue;
            bool earlier = false;
            for (int j = 0; disjoint_ && j < k - 1; ++j) earlier = earlier || B_.offset_contains(static_cast<std::size_t>(j), c);
            if (!earlier) out = G_.mul(out, x(k, c));
        }
    }
    n_memo_[key] = out;
    return out;
}

Element NkOracle::nhat(int k, Value b) {
    if (!B_.contains(b)) throw Error(Errc::NotBoundaryPoint, to_string(b) + " is not a boundary point");
    auto key = std::make_pair(k, b);
    if (auto it = nhat_memo_.find(key); it != nhat_memo_.end()) return it->second;
    Element out;
    if (k == 0) {
        if (B_.il(b) >= p_) {
            out = range(b - p_, b - p_ + mod_floor(-b, p_));
        } else {
            out = G_.identity();
        }
    } else {
        out = nhat(k - 1, b);
        for (Value c : B_.per_offset()[static_cast<std::size_t>(k - 1)]) {
            if (c < b) continue;
            bool earlier = false;
            for (int j = 0; disjoint_ && j < k - 1; ++j) earlier = earlier || B_.offset_contains(static_cast<std::size_t>(j), c);
            if (!earlier) out = G_.mul(out, x(k, c));
        }
    }
    nhat_memo_[key] = out;
    return out;
}

Element NkOracle::x(int k, Value c) {
    return G_.mul(G_.mul(G_.inverse(nhat(k - 1, c)), u(c)), n(k - 1, c));
}

namespace {

std::function<Element(Value)> body_u(const std::vector<FormulaPtr>& bodies, VarId z, const MonoidTable& G,
                                     const WordModel& w, const Assignment& a) {
    auto ev = std::make_shared<Evaluator>(w, Evaluator::Mode::Exact);
    return [ev, bodies, z, &G, a](Value i) { return ev->u_value(bodies, G, z, i, a); };
}

}  // namespace

Element nk_oracle(const WordModel& w, const Assignment& a, int k, Value b, const CollapseContext& ctx,
                  const std::vector<FormulaPtr>& bodies, const MonoidTable& G) {
    auto B = boundary_points(w, a, ctx);
    NkOracle o(B, G, body_u(bodies, ctx.pivot, G, w, a), ctx.p);
    return o.n(k, b);
}

Element nkhat_oracle(const WordModel& w, const Assignment& a, int k, Value b, const CollapseContext& ctx,
                     const std::vector<FormulaPtr>& bodies, const MonoidTable& G) {
    auto B = boundary_points(w, a, ctx);
    NkOracle o(B, G, body_u(bodies, ctx.pivot, G, w, a), ctx.p);
    return o.nhat(k, b);
}

std::optional<Element> interval_eval_quant(const std::vector<FormulaPtr>& bodies, VarId z, const MonoidTable& G,
                                           const WordModel& w, const Assignment& a, const BoundarySet& B, Value q) {
    for (auto& b : bodies) {
        if (!is_active_domain(b, w.neutral())) throw Error(Errc::BodiesNotActiveDomain, "body is not active-domain");
    }
    if (!G.is_group()) throw Error(Errc::NotAGroup, G.name() + " is not a group");
    Evaluator ev(w, Evaluator::Mode::Exact);
    auto u = [&](Value i) { return ev.u_value(bodies, G, z, i, a); };
    auto stretch = [&](Value start, Value len) {
        Element acc = G.identity();
        if (len <= 2 * q) {
            for (Value i = 0; i < len; ++i) acc = G.mul(acc, u(start + i));
            return acc;
        }
        std::vector<Element> pat;
        Element block = G.identity();
        for (Value j = 0; j < q; ++j) {
            pat.push_back(u(start + j));
            block = G.mul(block, pat.back());
        }
        acc = G.power(block, (len / q) % G.size());
        for (Value j = 0; j < len % q; ++j) acc = G.mul(acc, pat[static_cast<std::size_t>(j)]);
        return acc;
    };
    Element acc = G.identity();
    Value prev = -1;
    for (Value b : B.points()) {
        acc = G.mul(acc, stretch(prev + 1, b - prev - 1));
        acc = G.mul(acc, u(b));
        prev = b;
    }
    for (Value j = 1; j <= q; ++j) {
        if (u(prev + j) != G.identity()) return std::nullopt;
    }
    return acc;
}

}  // namespace adc

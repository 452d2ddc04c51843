#include "adc/collapse.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>

namespace adc {

namespace {

LinearTerm var_term(VarId v) { return LinearTerm::variable(v); }
LinearTerm const_term(Value c) { return LinearTerm::constant(c); }

FormulaPtr not_neutral(char neutral, VarId v) { return f_not(f_letter(neutral, var_term(v))); }

}  // namespace

FormulaPtr tail_substitute(const FormulaPtr& body, VarId z, Value e) {
    return map_atoms(body, [&](const FormulaPtr& a) -> FormulaPtr {
        if (!a->mentions_free(z)) return a;
        if (a->kind() == Kind::Letter) {
            if (!a->lhs().is_bare_variable()) throw Error(Errc::InvalidArgument, "letter on a compound pivot term");
            return f_false();
        }
        if (!is_normalized_atom(*a, z)) throw Error(Errc::InvalidArgument, "atom not normalized: " + print(a));
        switch (a->kind()) {
            case Kind::Less:
            case Kind::Eq:
                return f_false();
            case Kind::Greater:
                return f_true();
            case Kind::Cong:
                return f_cong(a->modulus(), const_term(e), a->rhs());
            default:
                return a;
        }
    });
}

// ---------------------------------------------------------------------------
// Group quantifiers

struct GroupCollapser::Impl {
    MonoidPtr G;
    Element target;
    std::vector<FormulaPtr> bodies;
    CollapseContext ctx;
    char neutral;
    Trace* trace;
    std::size_t max_trace;
    VarId z;
    int n;
    std::vector<std::vector<VarId>> V;
    std::vector<VarId> W;

    std::map<LinearTerm, std::vector<FormulaPtr>> subst_memo;
    std::map<std::pair<Element, LinearTerm>, FormulaPtr> u_memo;
    std::map<std::tuple<Value, ExtFunction, int>, FormulaPtr> delta_memo;
    std::map<std::tuple<ExtFunction, int, Value>, std::vector<std::vector<FormulaPtr>>> chain_memo;
    std::map<std::tuple<int, ExtFunction, int, bool>, std::vector<FormulaPtr>> nu_memo;
    std::map<std::pair<int, ExtFunction>, std::vector<FormulaPtr>> x_memo;
    std::map<std::tuple<int, ExtFunction, ExtFunction, int, bool>, std::vector<FormulaPtr>> gamma_memo;
    std::map<std::tuple<int, ExtFunction, ExtFunction, int, bool>, std::vector<FormulaPtr>> tau_memo;

    std::set<ExtFunction> family;
    std::size_t body_size = 0;
    std::size_t work = 0;

    void spend(std::size_t k) {
        work += k;
        if (ctx.max_work != 0 && work > ctx.max_work) {
            throw Error(Errc::SizeCap, "collapse of a " + G->name() + " quantifier exceeds the work cap");
        }
    }

    bool in_family(const ExtFunction& f) {
        if (family.empty()) {
            for (auto& fs : ctx.F) family.insert(fs.begin(), fs.end());
        }
        return family.count(f) > 0;
    }

    void note(const std::string& name, const FormulaPtr& f) {
        if (trace && trace->size() < max_trace) trace->emplace_back(name, f);
    }

    LinearTerm term(const ExtFunction& f, int level) const { return instantiate(f, V.at(static_cast<std::size_t>(level)), ctx); }

    std::vector<FormulaPtr> indicator(Element e) const {
        std::vector<FormulaPtr> out(static_cast<std::size_t>(n), f_false());
        out[static_cast<std::size_t>(e)] = f_true();
        return out;
    }

    // out[g] = OR_h a[h] & b[h^-1 g]
    std::vector<FormulaPtr> combine(const std::vector<FormulaPtr>& a, const std::vector<FormulaPtr>& b) {
        spend(static_cast<std::size_t>(n * n));
        std::vector<FormulaPtr> out;
        for (Element g = 0; g < n; ++g) {
            std::vector<FormulaPtr> dis;
            for (Element h = 0; h < n; ++h) {
                dis.push_back(f_and(a[static_cast<std::size_t>(h)],
                                    b[static_cast<std::size_t>(G->mul(G->inverse(h), g))]));
            }
            out.push_back(f_or(std::move(dis)));
        }
        return out;
    }

    const std::vector<FormulaPtr>& at(const LinearTerm& pos) {
        auto it = subst_memo.find(pos);
        if (it != subst_memo.end()) return it->second;
        spend(body_size);
        std::vector<FormulaPtr> out;
        for (auto& b : bodies) out.push_back(substitute(b, z, pos));
        return subst_memo.emplace(pos, std::move(out)).first->second;
    }

    FormulaPtr u_is(Element g, const LinearTerm& pos) {
        auto key = std::make_pair(g, pos);
        if (auto it = u_memo.find(key); it != u_memo.end()) return it->second;
        const auto& sb = at(pos);
        const auto& ord = G->ordering();
        FormulaPtr out;
        if (g == G->identity()) {
            std::vector<FormulaPtr> none;
            for (auto& b : sb) none.push_back(f_not(b));
            out = f_and(std::move(none));
        } else {
            std::vector<FormulaPtr> dis;
            for (std::size_t j = 0; j < ord.size(); ++j) {
                if (ord[j] != g) continue;
                std::vector<FormulaPtr> con;
                for (std::size_t i = 0; i < j; ++i) con.push_back(f_not(sb[i]));
                con.push_back(sb[j]);
                dis.push_back(f_and(std::move(con)));
            }
            out = f_or(std::move(dis));
        }
        u_memo[key] = out;
        return out;
    }

    std::vector<FormulaPtr> u_vec(const LinearTerm& pos) {
        std::vector<FormulaPtr> out;
        for (Element g = 0; g < n; ++g) out.push_back(u_is(g, pos));
        return out;
    }

    // Nested quantifiers of G with target m_1 over W_1 > ... > W_len, all non-neutral.
    FormulaPtr unique_tuple(std::size_t len, FormulaPtr body) {
        const std::size_t K = static_cast<std::size_t>(G->arity());
        for (std::size_t i = len; i-- > 0;) {
            auto guard = not_neutral(neutral, W[i]);
            if (i > 0) guard = f_and(guard, f_greater(var_term(W[i - 1]), var_term(W[i])));
            std::vector<FormulaPtr> bs(K, f_false());
            bs[0] = body;
            body = f_quant(G, G->ordering()[0], W[i], guard, std::move(bs));
        }
        return body;
    }

    FormulaPtr delta(Value l, const ExtFunction& f, int level) {
        auto key = std::make_tuple(l, f, level);
        if (auto it = delta_memo.find(key); it != delta_memo.end()) return it->second;
        const LinearTerm lhs = term(f, level) + l;
        spend(ctx.family_size());
        std::vector<FormulaPtr> dis;
        for (auto& family : ctx.F) {
            for (auto& fp : family) {
                dis.push_back(unique_tuple(fp.coeffs.size(), f_eq(instantiate(fp, W, ctx), lhs)));
            }
        }
        auto out = f_or(std::move(dis));
        if (l < 0) out = f_and(f_greater(lhs, const_term(-1)), out);
        delta_memo[key] = out;
        note("delta[l=" + to_string(l) + ",f=" + print_term(term(f, level)) + "]", out);
        return out;
    }

    // chain[i][g]: u(f+base) ... u(f+base+i-1) = g, for i in [0, p+1].
    const std::vector<std::vector<FormulaPtr>>& chain(const ExtFunction& f, int level, Value base) {
        auto key = std::make_tuple(f, level, base);
        if (auto it = chain_memo.find(key); it != chain_memo.end()) return it->second;
        std::vector<std::vector<FormulaPtr>> c{indicator(G->identity())};
        const LinearTerm t = term(f, level);
        for (Value i = 1; i <= ctx.p + 1; ++i) c.push_back(combine(c.back(), u_vec(t + (base + i - 1))));
        return chain_memo.emplace(key, std::move(c)).first->second;
    }

    std::vector<FormulaPtr> nu0(const ExtFunction& f, int level, bool hat) {
        const LinearTerm t = term(f, level);
        const Value p = ctx.p;
        std::vector<FormulaPtr> out;
        if (!hat) {
            const auto& c = chain(f, level, 1);
            std::vector<std::vector<FormulaPtr>> parts(static_cast<std::size_t>(n));
            FormulaPtr none_before = f_true();
            for (Value l = 0; l < p; ++l) {
                auto d = delta(l + 1, f, level);
                auto exact = f_and(d, none_before);
                for (Element g = 0; g < n; ++g) {
                    parts[static_cast<std::size_t>(g)].push_back(
                        f_and(exact, c[static_cast<std::size_t>(l)][static_cast<std::size_t>(g)]));
                }
                none_before = f_and(none_before, f_not(d));
            }
            for (Element g = 0; g < n; ++g) {
                std::vector<FormulaPtr> aligned;
                for (Value r = 0; r < p; ++r) {
                    aligned.push_back(f_and(f_cong(p, t + r, const_term(0)),
                                            c[static_cast<std::size_t>(r)][static_cast<std::size_t>(g)]));
                }
                parts[static_cast<std::size_t>(g)].push_back(f_and(none_before, f_or(std::move(aligned))));
                out.push_back(f_or(std::move(parts[static_cast<std::size_t>(g)])));
            }
        } else {
            const auto& c = chain(f, level, -p);
            std::vector<FormulaPtr> cond{f_greater(t, const_term(p - 1))};
            for (Value l = 1; l <= p; ++l) cond.push_back(f_not(delta(-l, f, level)));
            auto long_gap = f_and(std::move(cond));
            for (Element g = 0; g < n; ++g) {
                std::vector<FormulaPtr> aligned;
                for (Value r = 0; r < p; ++r) {
                    aligned.push_back(f_and(f_cong(p, t + r, const_term(0)),
                                            c[static_cast<std::size_t>(r + 1)][static_cast<std::size_t>(g)]));
                }
                out.push_back(f_or(f_and(long_gap, f_or(std::move(aligned))),
                                   f_and(f_not(long_gap), f_bool(g == G->identity()))));
            }
        }
        return out;
    }

    std::vector<FormulaPtr> nu(int k, const ExtFunction& f, int level, bool hat) {
        auto key = std::make_tuple(k, f, level, hat);
        if (auto it = nu_memo.find(key); it != nu_memo.end()) return it->second;
        auto out = k == 0 ? nu0(f, level, hat) : combine(nu(k - 1, f, level, hat), tree(k, f, level, hat));
        nu_memo[key] = out;
        std::string name = std::string(hat ? "nuhat" : "nu") + "[k=" + std::to_string(k) +
                           ",f=" + print_term(term(f, level)) + ",m=";
        for (Element g = 0; g < n; ++g) note(name + G->element_name(g) + "]", out[static_cast<std::size_t>(g)]);
        return out;
    }

    // (N^_{k-1}(b'))^-1 u(b') N_{k-1}(b') for b' = f'(V_{k-1}).
    std::vector<FormulaPtr> x_elem(int k, const ExtFunction& fp) {
        auto key = std::make_pair(k, fp);
        if (auto it = x_memo.find(key); it != x_memo.end()) return it->second;
        auto nh = nu(k - 1, fp, k - 1, true);
        auto nn = nu(k - 1, fp, k - 1, false);
        auto uu = u_vec(term(fp, k - 1));
        std::vector<FormulaPtr> inv_nh(static_cast<std::size_t>(n));
        for (Element a = 0; a < n; ++a) inv_nh[static_cast<std::size_t>(G->inverse(a))] = nh[static_cast<std::size_t>(a)];
        auto out = combine(combine(inv_nh, uu), nn);
        x_memo[key] = out;
        return out;
    }

    std::vector<FormulaPtr> gamma(int k, const ExtFunction& fp, const ExtFunction& f, int level, bool hat) {
        auto key = std::make_tuple(k, fp, f, level, hat);
        if (auto it = gamma_memo.find(key); it != gamma_memo.end()) return it->second;
        const LinearTerm bp = term(fp, k - 1);
        const LinearTerm b = term(f, level);
        auto skip = hat ? f_less(bp, b) : f_less(bp, b + 1);
        auto x = x_elem(k, fp);
        std::vector<FormulaPtr> out;
        for (Element g = 0; g < n; ++g) {
            out.push_back(f_or(f_and(skip, f_bool(g == G->identity())), f_and(f_not(skip), x[static_cast<std::size_t>(g)])));
        }
        gamma_memo[key] = out;
        return out;
    }

    std::vector<FormulaPtr> tau(int k, const ExtFunction& fp, const ExtFunction& f, int level, bool hat) {
        auto key = std::make_tuple(k, fp, f, level, hat);
        if (auto it = tau_memo.find(key); it != tau_memo.end()) return it->second;
        const std::size_t l = fp.coeffs.size();
        auto mid = gamma(k, fp, f, level, hat);
        std::vector<FormulaPtr> out;
        if (static_cast<int>(l) >= ctx.s) {
            out = mid;
        } else {
            const auto& tv = V.at(static_cast<std::size_t>(k - 1));
            const VarId xv = tv[l];
            auto guard = not_neutral(neutral, xv);
            if (l > 0) guard = f_and(guard, f_greater(var_term(tv[l - 1]), var_term(xv)));
            auto side = [&](Value lo, Value hi) -> std::optional<std::vector<FormulaPtr>> {
                std::optional<std::vector<FormulaPtr>> acc;
                for (Value a = lo; a <= hi; ++a) {
                    ExtFunction c = fp;
                    c.coeffs.push_back(a);
                    if (!in_family(c)) continue;
                    auto sub = tau(k, c, f, level, hat);
                    acc = acc ? combine(*acc, sub) : sub;
                }
                return acc;
            };
            auto pm = side(-ctx.delta, -1);
            auto pp = side(1, ctx.delta);
            std::vector<FormulaPtr> tminus = indicator(G->identity()), tplus = indicator(G->identity());
            std::vector<FormulaPtr> bm, bp;
            for (Element m : G->ordering()) {
                if (pm) bm.push_back((*pm)[static_cast<std::size_t>(G->inverse(m))]);
                if (pp) bp.push_back((*pp)[static_cast<std::size_t>(m)]);
            }
            for (Element g = 0; g < n; ++g) {
                if (pm) tminus[static_cast<std::size_t>(g)] = f_quant(G, G->inverse(g), xv, guard, bm);
                if (pp) tplus[static_cast<std::size_t>(g)] = f_quant(G, g, xv, guard, bp);
            }
            out = combine(combine(tminus, mid), tplus);
        }
        tau_memo[key] = out;
        return out;
    }

    std::vector<FormulaPtr> tree(int k, const ExtFunction& f, int level, bool hat) {
        ExtFunction root{{}, static_cast<std::size_t>(k - 1)};
        auto out = tau(k, root, f, level, hat);
        std::string name = std::string(hat ? "Gammahat" : "Gamma") + "[k=" + std::to_string(k) +
                           ",f=" + print_term(term(f, level)) + ",m=";
        for (Element g = 0; g < n; ++g) note(name + G->element_name(g) + "]", out[static_cast<std::size_t>(g)]);
        return out;
    }

    FormulaPtr tail_guard() {
        std::vector<FormulaPtr> none;
        for (std::size_t i = 0; i < bodies.size(); ++i) {
            std::vector<FormulaPtr> any;
            for (Value e = 0; e < ctx.q; ++e) any.push_back(tail_substitute(bodies[i], z, e));
            auto psi = f_or(std::move(any));
            note("psihat[" + std::to_string(i + 1) + "]", psi);
            none.push_back(f_not(psi));
        }
        return f_and(std::move(none));
    }

    FormulaPtr build() {
        if (n == 1) return f_and(tail_guard(), f_bool(target == G->identity()));
        std::size_t zero_index = 0;
        for (std::size_t i = 0; i < ctx.T.size(); ++i) {
            if (ctx.T[i] == LinearTerm()) zero_index = i;
        }
        const int L = static_cast<int>(ctx.T.size());
        ExtFunction zero{{}, zero_index};
        auto top = nu(L, zero, L, false);
        auto u0 = u_vec(const_term(0));
        std::vector<FormulaPtr> dis;
        for (Element g = 0; g < n; ++g) {
            dis.push_back(f_and(u0[static_cast<std::size_t>(g)],
                                top[static_cast<std::size_t>(G->mul(G->inverse(g), target))]));
        }
        auto out = f_and(tail_guard(), f_or(std::move(dis)));
        return out;
    }
};

GroupCollapser::GroupCollapser(MonoidPtr G, Element target, std::vector<FormulaPtr> bodies, CollapseContext ctx,
                               char neutral, Trace* trace, std::size_t max_trace)
    : impl_(std::make_unique<Impl>()) {
    if (!G->is_group()) throw Error(Errc::NotAGroup, G->name() + " is not a group");
    if (G->arity() != G->size() - 1) {
        throw Error(Errc::UnsupportedMonoid, "the ordering of " + G->name() + " must list every non-identity element");
    }
    for (auto& b : bodies) {
        if (!is_active_domain(b, neutral)) throw Error(Errc::BodiesNotActiveDomain, "body is not active-domain: " + print(b));
    }
    auto& I = *impl_;
    for (auto& b : bodies) I.body_size += dag_size(b);
    I.G = std::move(G);
    I.target = target;
    I.bodies = std::move(bodies);
    I.ctx = std::move(ctx);
    I.neutral = neutral;
    I.trace = trace;
    I.max_trace = max_trace;
    I.z = I.ctx.pivot;
    I.n = I.G->size();
    const std::string tag = "_c" + std::to_string(fresh_var("_k")) + "_";
    for (std::size_t level = 0; level <= I.ctx.T.size(); ++level) {
        std::vector<VarId> row;
        for (int i = 0; i < I.ctx.s; ++i) row.push_back(fresh_var(tag + "v" + std::to_string(level) + "_"));
        I.V.push_back(std::move(row));
    }
    for (int i = 0; i < I.ctx.s; ++i) I.W.push_back(fresh_var(tag + "w"));
}

GroupCollapser::~GroupCollapser() = default;

FormulaPtr GroupCollapser::build() { return impl_->build(); }
FormulaPtr GroupCollapser::delta(Value l, const ExtFunction& f, int level) { return impl_->delta(l, f, level); }
std::vector<FormulaPtr> GroupCollapser::pi(const ExtFunction& f, int level, Value base, Value len) {
    if (len < 0 || len > impl_->ctx.p + 1) throw Error(Errc::InvalidArgument, "chain length out of range");
    return impl_->chain(f, level, base).at(static_cast<std::size_t>(len));
}
std::vector<FormulaPtr> GroupCollapser::nu(int k, const ExtFunction& f, int level, bool hat) {
    if (level < k) throw Error(Errc::InvalidArgument, "parameter level must be at least k");
    return impl_->nu(k, f, level, hat);
}
std::vector<FormulaPtr> GroupCollapser::gamma(int k, const ExtFunction& fprime, const ExtFunction& f, int level, bool hat) {
    return impl_->gamma(k, fprime, f, level, hat);
}
std::vector<FormulaPtr> GroupCollapser::tree(int k, const ExtFunction& f, int level, bool hat) {
    if (level < k) throw Error(Errc::InvalidArgument, "parameter level must be at least k");
    return impl_->tree(k, f, level, hat);
}
FormulaPtr GroupCollapser::u_is(Element g, const LinearTerm& pos) { return impl_->u_is(g, pos); }
FormulaPtr GroupCollapser::tail_guard() { return impl_->tail_guard(); }
const std::vector<VarId>& GroupCollapser::params(int level) const { return impl_->V.at(static_cast<std::size_t>(level)); }
const CollapseContext& GroupCollapser::context() const { return impl_->ctx; }

// ---------------------------------------------------------------------------
// U_1

FormulaPtr collapse_u1_witness(const MonoidPtr& M, const FormulaPtr& body, const CollapseContext& ctx, char neutral) {
    if (!M->is_u1() || M->arity() != 1) throw Error(Errc::UnsupportedMonoid, M->name() + " is not U1");
    if (!is_active_domain(body, neutral)) throw Error(Errc::BodiesNotActiveDomain, "body is not active-domain: " + print(body));
    const VarId z = ctx.pivot;
    const Element hit = M->ordering()[0];
    const std::string tag = "_c" + std::to_string(fresh_var("_k")) + "_";
    std::vector<VarId> W;
    for (int i = 0; i < ctx.s; ++i) W.push_back(fresh_var(tag + "w"));
    if (ctx.max_work != 0 && dag_size(body) * ctx.family_size() * static_cast<std::size_t>(ctx.q + 1) > ctx.max_work) {
        throw Error(Errc::SizeCap, "collapse of a " + M->name() + " quantifier exceeds the work cap");
    }
    std::vector<FormulaPtr> dis;
    for (Value e = 0; e < ctx.q; ++e) dis.push_back(tail_substitute(body, z, e));
    for (auto& family : ctx.F) {
        for (auto& f : family) {
            for (Value l = 0; l <= ctx.q; ++l) {
                LinearTerm pos = instantiate(f, W, ctx) + l;
                FormulaPtr w = f_and(f_greater(pos, const_term(-1)), substitute(body, z, pos));
                for (std::size_t i = f.coeffs.size(); i-- > 0;) {
                    auto guard = not_neutral(neutral, W[i]);
                    if (i > 0) guard = f_and(guard, f_greater(var_term(W[i - 1]), var_term(W[i])));
                    w = f_quant(M, hit, W[i], guard, {w});
                }
                dis.push_back(w);
            }
        }
    }
    return f_or(std::move(dis));
}

// ---------------------------------------------------------------------------
// Driver

namespace {

class Collapser {
public:
    explicit Collapser(const CollapseOptions& o) : opts_(o) {}

    std::pair<FormulaPtr, Value> run(const FormulaPtr& f) {
        if (auto it = memo_.find(f.get()); it != memo_.end()) return it->second;
        std::pair<FormulaPtr, Value> out{f, 2};
        switch (f->kind()) {
            case Kind::Not: {
                auto a = run(f->children()[0]);
                out = {f_not(a.first), a.second};
                break;
            }
            case Kind::And:
            case Kind::Or: {
                std::vector<FormulaPtr> kids;
                Value r = 2;
                for (auto& k : f->children()) {
                    auto a = run(k);
                    kids.push_back(a.first);
                    r = std::max(r, a.second);
                }
                out = {f->kind() == Kind::And ? f_and(std::move(kids)) : f_or(std::move(kids)), r};
                break;
            }
            case Kind::Quant:
                out = quant(f);
                break;
            default:
                break;
        }
        memo_[f.get()] = out;
        return out;
    }

    Trace trace;

private:
    std::pair<FormulaPtr, Value> quant(const FormulaPtr& f) {
        const MonoidPtr& M = f->monoid();
        if (!M->is_group() && !M->is_u1()) {
            throw Error(Errc::UnsupportedMonoid, M->name() + " is neither a group nor U1");
        }
        auto g = run(f->guard());
        Value r = g.second;
        std::vector<FormulaPtr> bodies;
        for (auto& b : f->bodies()) {
            auto a = run(b);
            bodies.push_back(a.first);
            r = std::max(r, a.second);
        }
        if (is_ad_guarded(*f, opts_.neutral)) {
            return {f_quant(M, f->target(), f->bound_var(), g.first, std::move(bodies)), r};
        }
        const VarId z = f->bound_var();
        if (g.first->kind() != Kind::True) {
            for (auto& b : bodies) b = f_and(g.first, b);
        }
        auto nb = normalize_bodies(bodies, z, LetterTrick{opts_.neutral, M});
        for (auto& b : nb.bodies) {
            if (!is_active_domain(b, opts_.neutral)) {
                throw Error(Errc::BodiesNotActiveDomain, "body is not active-domain: " + print(b));
            }
        }
        std::vector<VarId> free;
        for (auto& b : nb.bodies) {
            for (VarId v : b->free_vars()) {
                if (v != z) free.push_back(v);
            }
        }
        std::sort(free.begin(), free.end());
        free.erase(std::unique(free.begin(), free.end()), free.end());
        auto ctx = collapse_params(nb.bodies, z, free, M->size(), r, opts_.params);
        Trace* tr = opts_.trace ? &trace : nullptr;
        FormulaPtr out;
        if (M->is_group()) {
            GroupCollapser gc(M, f->target(), nb.bodies, ctx, opts_.neutral, tr, opts_.max_trace);
            out = gc.build();
        } else if (M->arity() == 0) {
            out = f_bool(f->target() == M->identity());
        } else {
            auto w = collapse_u1_witness(M, nb.bodies[0], ctx, opts_.neutral);
            if (tr && tr->size() < opts_.max_trace) tr->emplace_back("u1witness[" + var_name(z) + "]", w);
            out = f->target() == M->identity() ? f_not(w) : w;
        }
        return {out, ctx.rphi};
    }

    CollapseOptions opts_;
    std::unordered_map<const Formula*, std::pair<FormulaPtr, Value>> memo_;
};

MonoidPtr first_monoid(const FormulaPtr& f) {
    MonoidPtr m;
    for_each_node(f, [&](const FormulaPtr& x) {
        if (!m && x->kind() == Kind::Quant) m = x->monoid();
    });
    return m;
}

}  // namespace

CollapseResult collapse(const FormulaPtr& phi, const CollapseOptions& opts) {
    Collapser c(opts);
    auto [f, r] = c.run(phi);
    if (auto m = first_monoid(phi)) f = rewrite_compound_letters(f, LetterTrick{opts.neutral, m});
    CollapseResult out;
    out.formula = f;
    out.threshold = r;
    out.trace = std::move(c.trace);
    return out;
}

CollapseResult collapse_group_quant(const FormulaPtr& q, const CollapseOptions& opts) {
    if (q->kind() != Kind::Quant) throw Error(Errc::InvalidArgument, "not a quantifier");
    if (!q->monoid()->is_group()) throw Error(Errc::NotAGroup, q->monoid()->name() + " is not a group");
    return collapse(q, opts);
}

CollapseResult collapse_u1_quant(const FormulaPtr& q, const CollapseOptions& opts) {
    if (q->kind() != Kind::Quant) throw Error(Errc::InvalidArgument, "not a quantifier");
    if (!q->monoid()->is_u1()) throw Error(Errc::UnsupportedMonoid, q->monoid()->name() + " is not U1");
    return collapse(q, opts);
}

}  // namespace adc

#include "adc/semantics.hpp"

#include <algorithm>
#include <unordered_set>

namespace adc {

const char* verdict_name(OmegaVerdict v) {
    switch (v) {
        case OmegaVerdict::True: return "True";
        case OmegaVerdict::False: return "False";
        case OmegaVerdict::NonConvergent: return "NonConvergent";
    }
    return "?";
}

bool Evaluator::Key::operator==(const Key& o) const {
    if (node != o.node || n != o.n) return false;
    for (std::uint8_t i = 0; i < n; ++i) {
        if (vals[i] != o.vals[i]) return false;
    }
    return true;
}

std::size_t Evaluator::KeyHash::operator()(const Key& k) const noexcept {
    std::size_t h = std::hash<const void*>()(k.node);
    ValueHash vh;
    for (std::uint8_t i = 0; i < k.n; ++i) h = h * 1000003u ^ vh(k.vals[i]);
    return h;
}

Evaluator::Evaluator(const WordModel& w, Mode mode, Value horizon)
    : w_(w), mode_(mode), horizon_(horizon), support_(w.nnp()) {
    if (mode_ == Mode::Finite) {
        support_.erase(std::remove_if(support_.begin(), support_.end(), [&](Value p) { return p >= horizon_; }),
                       support_.end());
    }
}

void Evaluator::bind(VarId v, Value x) {
    if (v >= env_.size()) {
        env_.resize(v + 1, 0);
        bound_.resize(v + 1, 0);
    }
    env_[v] = x;
    bound_[v] = 1;
}

void Evaluator::unbind(VarId v) {
    if (v < bound_.size()) bound_[v] = 0;
}

bool Evaluator::eval(const FormulaPtr& f, const Assignment& a) {
    const std::size_t n = var_count();
    if (env_.size() < n) {
        env_.resize(n, 0);
        bound_.resize(n, 0);
    }
    std::fill(bound_.begin(), bound_.end(), 0);
    for (auto& [v, x] : a) bind(v, x);
    for (VarId v : f->free_vars()) {
        if (v >= bound_.size() || !bound_[v]) throw Error(Errc::InvalidArgument, "unassigned free variable " + var_name(v));
    }
    return holds(f);
}

Element Evaluator::u_value(const std::vector<FormulaPtr>& bodies, const MonoidTable& m, VarId z, Value i,
                           const Assignment& a) {
    if (static_cast<int>(bodies.size()) != m.arity()) throw Error(Errc::ArityMismatch, "u_value: wrong number of bodies");
    Assignment b = a;
    b[z] = i;
    for (std::size_t j = 0; j < bodies.size(); ++j) {
        if (eval(bodies[j], b)) return m.ordering()[j];
    }
    return m.identity();
}

Value Evaluator::term(const LinearTerm& t) const {
    Value acc = t.constant_part();
    for (auto& [v, c] : t.terms()) {
        if (v >= bound_.size() || !bound_[v]) throw Error(Errc::InvalidArgument, "unassigned variable " + var_name(v));
        acc = checked_add(acc, checked_mul(c, env_[v]));
    }
    return acc;
}

bool Evaluator::ad_guarded(const Formula& q) {
    auto it = guarded_.find(&q);
    if (it != guarded_.end()) return it->second;
    bool g = is_ad_guarded(q, w_.neutral());
    guarded_[&q] = g;
    return g;
}

bool Evaluator::holds(const FormulaPtr& f) {
    const bool cacheable = (f->kind() == Kind::Quant || f->kind() == Kind::And || f->kind() == Kind::Or) &&
                           f->free_vars().size() <= 8;
    if (!cacheable) return holds_uncached(f);
    Key k{f.get(), {}, static_cast<std::uint8_t>(f->free_vars().size())};
    for (std::size_t i = 0; i < f->free_vars().size(); ++i) {
        VarId v = f->free_vars()[i];
        if (v >= bound_.size() || !bound_[v]) throw Error(Errc::InvalidArgument, "unassigned variable " + var_name(v));
        k.vals[i] = env_[v];
    }
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    bool r = holds_uncached(f);
    memo_.emplace(k, r);
    return r;
}

bool Evaluator::holds_uncached(const FormulaPtr& f) {
    switch (f->kind()) {
        case Kind::True:
            return true;
        case Kind::False:
            return false;
        case Kind::Letter: {
            Value p = term(f->lhs());
            if (p < 0) return false;
            return w_.letter_at(p) == f->letter();
        }
        case Kind::Less:
            return term(f->lhs()) < term(f->rhs());
        case Kind::Greater:
            return term(f->lhs()) > term(f->rhs());
        case Kind::Eq:
            return term(f->lhs()) == term(f->rhs());
        case Kind::Cong:
            return mod_floor(term(f->rhs()) - term(f->lhs()), f->modulus()) == 0;
        case Kind::Not:
            return !holds(f->children()[0]);
        case Kind::And:
            for (auto& k : f->children()) {
                if (!holds(k)) return false;
            }
            return true;
        case Kind::Or:
            for (auto& k : f->children()) {
                if (holds(k)) return true;
            }
            return false;
        case Kind::Quant:
            return quantifier(f);
    }
    return false;
}

Element Evaluator::select(const Formula& q) {
    const auto& m = *q.monoid();
    for (std::size_t j = 0; j < q.bodies().size(); ++j) {
        if (holds(q.bodies()[j])) return m.ordering()[j];
    }
    return m.identity();
}

namespace {

struct SavedBinding {
    SavedBinding(std::vector<Value>& env, std::vector<std::uint8_t>& bound, VarId v) : env_(env), bound_(bound), v_(v) {
        if (v >= env.size()) {
            env.resize(v + 1, 0);
            bound.resize(v + 1, 0);
        }
        value_ = env[v];
        was_bound_ = bound[v];
    }
    ~SavedBinding() {
        env_[v_] = value_;
        bound_[v_] = was_bound_;
    }
    std::vector<Value>& env_;
    std::vector<std::uint8_t>& bound_;
    VarId v_;
    Value value_;
    std::uint8_t was_bound_;
};

}  // namespace

bool Evaluator::quantifier(const FormulaPtr& q) {
    const auto& m = *q->monoid();
    const VarId x = q->bound_var();
    SavedBinding save(env_, bound_, x);
    if (ad_guarded(*q) || mode_ == Mode::Finite) {
        Element acc = m.identity();
        auto visit = [&](Value p) {
            bind(x, p);
            if (holds(q->guard())) acc = m.mul(acc, select(*q));
        };
        if (ad_guarded(*q)) {
            for (Value p : support_) visit(p);
        } else {
            for (Value p = 0; p < horizon_; ++p) visit(p);
        }
        return acc == q->target();
    }
    auto prod = exact_product(q);
    return prod && *prod == q->target();
}

// ---------------------------------------------------------------------------
// Critical points of an unguarded quantifier in exact mode.

class CritWalker {
public:
    CritWalker(Evaluator& ev, VarId z) : ev_(ev), z_(z) {}

    void walk(const FormulaPtr& f) {
        if (!visited_.insert({f.get(), inner_ != nullptr}).second) return;
        if (f->is_atom()) {
            atom(*f);
            return;
        }
        if (f->kind() == Kind::Quant) {
            quant(f);
            return;
        }
        for (auto& k : f->children()) walk(k);
    }

    std::vector<Value> points;
    Value period = 1;

private:
    struct Fn {
        Value alpha, beta, gamma;
    };
    struct Inner {
        VarId y;
        std::vector<Fn> fns;
        Value q = 1;
        const MonoidTable* m;
    };

    struct PairHash {
        std::size_t operator()(const std::pair<const Formula*, bool>& p) const noexcept {
            return std::hash<const void*>()(p.first) ^ (p.second ? 0x9e3779b9u : 0u);
        }
    };

    void quant(const FormulaPtr& f) {
        VarId x = f->bound_var();
        if (x == z_ || (inner_ && x == inner_->y)) throw Error(Errc::Unsupported, "shadowed quantifier variable");
        if (ev_.ad_guarded(*f)) {
            ad_.push_back(x);
            walk(f->guard());
            for (auto& b : f->bodies()) walk(b);
            ad_.pop_back();
            return;
        }
        if (inner_) throw Error(Errc::Unsupported, "unguarded quantifiers nested deeper than two");
        Inner in{x, {}, 1, f->monoid().get()};
        inner_ = &in;
        walk(f->guard());
        for (auto& b : f->bodies()) walk(b);
        inner_ = nullptr;
        finish_inner(in);
    }

    void add_around(Value num, Value den) {
        Value lo = floor_div(num, den) - 1;
        Value hi = ceil_div(num, den) + 1;
        for (Value p = std::max<Value>(lo, 0); p <= hi; ++p) points.push_back(p);
    }

    void atom(const Formula& f) {
        LinearTerm d = f.kind() == Kind::Letter ? f.lhs() : f.lhs() - f.rhs();
        Value az = 0, ay = 0, kappa = d.constant_part();
        std::vector<std::pair<VarId, Value>> ad_terms;
        for (auto& [v, c] : d.terms()) {
            if (v == z_) {
                az += c;
            } else if (inner_ && v == inner_->y) {
                ay += c;
            } else if (std::find(ad_.begin(), ad_.end(), v) != ad_.end()) {
                ad_terms.push_back({v, c});
            } else if (v < ev_.bound_.size() && ev_.bound_[v]) {
                kappa = checked_add(kappa, checked_mul(c, ev_.env_[v]));
            } else {
                throw Error(Errc::Unsupported, "variable " + var_name(v) + " is not in scope");
            }
        }
        if (az == 0 && ay == 0) return;
        const auto& sup = ev_.support_;
        if (!ad_terms.empty() && sup.empty()) return;
        std::size_t combos = 1;
        for (std::size_t i = 0; i < ad_terms.size(); ++i) {
            combos *= sup.size();
            if (combos > 1000000) throw Error(Errc::Unsupported, "too many active-domain combinations");
        }
        for (std::size_t c = 0; c < combos; ++c) {
            Value k = kappa;
            std::size_t rest = c;
            for (auto& [v, coef] : ad_terms) {
                k = checked_add(k, checked_mul(coef, sup[rest % sup.size()]));
                rest /= sup.size();
            }
            one(f, az, ay, k);
        }
    }

    void one(const Formula& f, Value az, Value ay, Value kappa) {
        Value s = ay > 0 ? 1 : -1;
        if (f.kind() == Kind::Letter) {
            std::vector<Value> targets{-1, 0};
            targets.insert(targets.end(), ev_.support_.begin(), ev_.support_.end());
            for (Value t : targets) {
                if (ay == 0) {
                    add_around(t - kappa, az);
                } else {
                    inner_->fns.push_back({-az * s, (t - kappa) * s, abs_value(ay)});
                }
            }
            return;
        }
        if (f.kind() == Kind::Cong) {
            if (az != 0) period = lcm_value(period, f.modulus());
            if (ay != 0) inner_->q = lcm_value(inner_->q, f.modulus());
            return;
        }
        if (ay == 0) {
            add_around(-kappa, az);
        } else {
            inner_->fns.push_back({-az * s, -kappa * s, abs_value(ay)});
        }
    }

    void finish_inner(Inner& in) {
        in.fns.push_back({0, 0, 1});
        in.fns.push_back({0, -1, 1});
        const Value w = in.q * (in.m->max_index() + in.m->period_lcm() + 1) + 4;
        Value gammas = 1;
        for (auto& f : in.fns) gammas = lcm_value(gammas, f.gamma);
        for (std::size_t i = 0; i < in.fns.size(); ++i) {
            for (std::size_t j = i + 1; j < in.fns.size(); ++j) {
                const Fn& a = in.fns[i];
                const Fn& b = in.fns[j];
                Value det = a.alpha * b.gamma - b.alpha * a.gamma;
                if (det == 0) continue;
                Value num = b.beta * a.gamma - a.beta * b.gamma;
                Value h = ceil_div((w + 4) * a.gamma * b.gamma, abs_value(det)) + 2;
                Value lo = std::max<Value>(floor_div(num, det) - h, 0);
                Value hi = ceil_div(num, det) + h;
                if (hi < lo) continue;
                if (hi - lo > 200000) throw Error(Errc::Unsupported, "crossing region too wide");
                for (Value p = lo; p <= hi; ++p) points.push_back(p);
            }
        }
        period = lcm_value(period, checked_mul(checked_mul(gammas, in.q), in.m->period_lcm()));
    }

    Evaluator& ev_;
    VarId z_;
    std::vector<VarId> ad_;
    Inner* inner_ = nullptr;
    std::unordered_set<std::pair<const Formula*, bool>, PairHash> visited_;
};

std::optional<Element> Evaluator::exact_product(const FormulaPtr& q) {
    const auto& m = *q->monoid();
    const VarId x = q->bound_var();
    CritWalker cw(*this, x);
    cw.walk(q->guard());
    for (auto& b : q->bodies()) cw.walk(b);
    auto& pts = cw.points;
    pts.push_back(0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const Value period = cw.period;

    auto u = [&](Value p) -> Element {
        bind(x, p);
        return holds(q->guard()) ? select(*q) : m.identity();
    };
    auto gap = [&](Value start, Value len) -> Element {
        if (len <= 2 * period + 2) {
            Element acc = m.identity();
            for (Value i = 0; i < len; ++i) acc = m.mul(acc, u(start + i));
            return acc;
        }
        Element block = m.identity();
        std::vector<Element> pat;
        for (Value j = 0; j < period; ++j) {
            pat.push_back(u(start + j));
            block = m.mul(block, pat.back());
        }
        Element acc = m.power(block, len / period);
        for (Value j = 0; j < len % period; ++j) acc = m.mul(acc, pat[static_cast<std::size_t>(j)]);
        return acc;
    };

    Element acc = m.identity();
    Value prev = -1;
    for (Value c : pts) {
        acc = m.mul(acc, gap(prev + 1, c - prev - 1));
        acc = m.mul(acc, u(c));
        prev = c;
    }
    // Periodic tail: defined iff the prefix products become constant.
    std::vector<Element> pre{m.identity()};
    for (Value j = 0; j < period; ++j) pre.push_back(m.mul(pre.back(), u(prev + 1 + j)));
    const Element block = pre.back();
    std::vector<Element> pw{m.identity()};
    std::map<Element, std::size_t> first;
    first[m.identity()] = 0;
    std::size_t i0 = 0, cycle = 1;
    for (;;) {
        Element nxt = m.mul(pw.back(), block);
        auto it = first.find(nxt);
        if (it != first.end()) {
            i0 = it->second;
            cycle = pw.size() - it->second;
            break;
        }
        first[nxt] = pw.size();
        pw.push_back(nxt);
    }
    const Element ref = m.mul(acc, pw[i0]);
    for (std::size_t k = i0; k < i0 + cycle; ++k) {
        for (std::size_t j = 0; j + 1 < pre.size(); ++j) {
            if (m.mul(m.mul(acc, pw[k]), pre[j]) != ref) return std::nullopt;
        }
    }
    return ref;
}

// ---------------------------------------------------------------------------

Element u_value(const std::vector<FormulaPtr>& bodies, const MonoidTable& m, VarId z, const WordModel& w, Value i,
                const Assignment& a) {
    Evaluator ev(w, Evaluator::Mode::Exact);
    return ev.u_value(bodies, m, z, i, a);
}

namespace {

Value max_mentioned(const WordModel& w, const Assignment& a) {
    Value mx = std::max<Value>(w.max_support(), 0);
    for (auto& [v, x] : a) mx = std::max(mx, x);
    return mx;
}

}  // namespace

bool eval_finite(const FormulaPtr& f, const WordModel& w, const Assignment& a, Value horizon) {
    Value need = 1 + std::max<Value>(w.max_support(), 0);
    for (auto& [v, x] : a) {
        if (f->mentions_free(v)) need = std::max(need, x + 1);
    }
    if (horizon < need) throw Error(Errc::HorizonTooSmall, "horizon " + to_string(horizon) + " below " + to_string(need));
    Evaluator ev(w, Evaluator::Mode::Finite, horizon);
    return ev.eval(f, a);
}

Value default_lambda(const FormulaPtr& f) {
    Value moduli = 1, orders = 1;
    for_each_node(f, [&](const FormulaPtr& x) {
        if (x->kind() == Kind::Cong) moduli = lcm_value(moduli, x->modulus());
        if (x->kind() == Kind::Quant) orders = lcm_value(orders, x->monoid()->size());
    });
    return checked_mul(moduli, orders);
}

OmegaVerdict eval_omega(const FormulaPtr& f, const WordModel& w, const Assignment& a, const OmegaPolicy& policy) {
    Value floor_h0 = 2 * (1 + max_mentioned(w, a));
    Value h0 = policy.h0 == 0 ? floor_h0 : policy.h0;
    if (h0 < 2 * (1 + std::max<Value>(w.max_support(), 0))) {
        throw Error(Errc::HorizonTooSmall, "H0 must be at least 2(1 + max support)");
    }
    Value lambda = policy.lambda == 0 ? default_lambda(f) : policy.lambda;
    std::vector<Value> horizons;
    for (Value i = 0; i <= lambda; ++i) horizons.push_back(h0 + i);
    for (int j = 0; j <= policy.probes; ++j) horizons.push_back(h0 + j * lambda);
    std::sort(horizons.begin(), horizons.end());
    horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
    std::optional<bool> seen;
    for (Value h : horizons) {
        bool v = eval_finite(f, w, a, h);
        if (seen && *seen != v) return OmegaVerdict::NonConvergent;
        seen = v;
    }
    return verdict_of(*seen);
}

bool eval_exact(const FormulaPtr& f, const WordModel& w, const Assignment& a) {
    Evaluator ev(w, Evaluator::Mode::Exact);
    return ev.eval(f, a);
}

OmegaVerdict omega_truth(const FormulaPtr& f, const WordModel& w, const Assignment& a) {
    try {
        return verdict_of(eval_exact(f, w, a));
    } catch (const Error& e) {
        if (e.code() != Errc::Unsupported) throw;
    }
    return eval_omega(f, w, a);
}

}  // namespace adc

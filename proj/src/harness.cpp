#include "adc/harness.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <thread>

namespace adc {

void EquivReport::add_failure(Counterexample c, std::size_t keep) {
    if (counterexamples.size() < keep) {
        counterexamples.push_back(std::move(c));
    } else {
        ++dropped;
    }
}

void EquivReport::merge(const EquivReport& o, std::size_t keep) {
    total += o.total;
    agreements += o.agreements;
    nonconvergent += o.nonconvergent;
    rhs_nonconvergent += o.rhs_nonconvergent;
    skipped += o.skipped;
    dropped += o.dropped;
    for (auto& c : o.counterexamples) add_failure(c, keep);
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

Assignment random_assignment(const std::vector<VarId>& vars, const std::vector<Value>& dom, std::mt19937_64& rng) {
    Assignment a;
    std::uniform_int_distribution<std::size_t> pick(0, dom.size());
    for (VarId v : vars) {
        std::size_t i = pick(rng);
        a[v] = i == dom.size() ? 0 : dom[i];
    }
    return a;
}

std::vector<char> non_neutral(const std::string& letters, char neutral) {
    std::vector<char> out;
    for (char c : letters) {
        if (c != neutral) out.push_back(c);
    }
    if (out.empty()) throw Error(Errc::InvalidArgument, "alphabet has no non-neutral letter");
    return out;
}

}  // namespace

std::vector<Sample> sample_instances(const std::vector<VarId>& free_vars, Value r, const SamplerConfig& config,
                                     std::uint64_t seed) {
    DomainDr d{r, config.max_exp};
    const auto dom = d.elements();
    const auto letters = non_neutral(config.letters, config.neutral);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> letter(0, letters.size() - 1);
    std::vector<Sample> out;

    const std::size_t n = dom.size();
    const std::size_t small = std::min(config.exhaustive_size, n);
    for (std::size_t size = 0; size <= small && out.size() < config.samples_per_r; ++size) {
        std::vector<bool> pick(n, false);
        std::fill(pick.end() - static_cast<std::ptrdiff_t>(size), pick.end(), true);
        do {
            WordModel w(config.neutral);
            for (std::size_t i = 0; i < n; ++i) {
                if (pick[i]) w.set(dom[i], letters[letter(rng)]);
            }
            out.push_back({std::move(w), random_assignment(free_vars, dom, rng)});
        } while (out.size() < config.samples_per_r && std::next_permutation(pick.begin(), pick.end()));
    }
    const int max_count = std::min(config.max_support, static_cast<int>(n));
    std::uniform_int_distribution<int> count(0, max_count);
    const auto alphabet = Alphabet::of(config.letters, config.neutral);
    while (out.size() < config.samples_per_r) {
        auto w = sample_word(d, alphabet, count(rng), rng());
        out.push_back({std::move(w), random_assignment(free_vars, dom, rng)});
    }
    return out;
}

EquivReport equivalence_on(const FormulaPtr& phi, const FormulaPtr& psi, const std::vector<Sample>& samples,
                           unsigned threads, std::size_t keep) {
    std::vector<std::pair<OmegaVerdict, OmegaVerdict>> verdicts(samples.size());
    auto work = [&](std::size_t from, std::size_t step) {
        for (std::size_t i = from; i < samples.size(); i += step) {
            verdicts[i] = {omega_truth(phi, samples[i].word, samples[i].assignment),
                           omega_truth(psi, samples[i].word, samples[i].assignment)};
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(samples.size())));
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    work(t, threads);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    EquivReport rep;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto [l, r] = verdicts[i];
        ++rep.total;
        if (l == OmegaVerdict::NonConvergent || r == OmegaVerdict::NonConvergent) {
            ++rep.nonconvergent;
            if (r == OmegaVerdict::NonConvergent) ++rep.rhs_nonconvergent;
        } else if (l == r) {
            ++rep.agreements;
        } else {
            rep.add_failure({samples[i].word, samples[i].assignment, l, r, {}}, keep);
        }
    }
    return rep;
}

EquivReport equivalence_check(const FormulaPtr& phi, const FormulaPtr& psi, const SamplerConfig& config) {
    std::vector<VarId> vars = phi->free_vars();
    for (VarId v : psi->free_vars()) vars.push_back(v);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    EquivReport rep;
    std::uint64_t seed = config.seed;
    for (Value r : config.radices) {
        auto samples = sample_instances(vars, r, config, seed++);
        rep.merge(equivalence_on(phi, psi, samples, config.threads, config.keep_counterexamples),
                  config.keep_counterexamples);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Neutral-letter invariance

EquivReport neutral_invariance_check(const FormulaPtr& psi, const InvarianceConfig& config) {
    if (!is_active_domain(psi, config.neutral) || !is_order_only(psi)) {
        throw Error(Errc::NotActiveDomain, "not an order-only active-domain formula: " + print(psi));
    }
    if (!psi->free_vars().empty()) throw Error(Errc::InvalidArgument, "invariance needs a sentence");
    const auto letters = non_neutral(config.letters, config.neutral);
    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<int> length(0, config.max_length);
    std::uniform_int_distribution<int> edits(1, std::max(1, config.max_edits));
    std::uniform_int_distribution<std::size_t> letter(0, letters.size() - 1);
    EquivReport rep;
    const Assignment none;
    for (std::size_t trial = 0; trial < config.trials; ++trial) {
        WordModel w(config.neutral);
        const int len = length(rng);
        for (int i = 0; i < len; ++i) {
            if (rng() % 2) w.set(i, letters[letter(rng)]);
        }
        WordModel e = w;
        const int k = edits(rng);
        for (int j = 0; j < k; ++j) {
            Value span = e.max_support() + 2;
            std::uniform_int_distribution<long long> at(0, static_cast<long long>(span));
            Value pos = at(rng);
            if (rng() % 2 && e.is_neutral_at(pos)) {
                e = delete_neutral(e, pos);
            } else {
                e = insert_neutral(e, pos);
            }
        }
        auto before = omega_truth(psi, w, none);
        auto after = omega_truth(psi, e, none);
        ++rep.total;
        if (before == OmegaVerdict::NonConvergent || after == OmegaVerdict::NonConvergent) {
            ++rep.nonconvergent;
            if (after == OmegaVerdict::NonConvergent) ++rep.rhs_nonconvergent;
        } else if (before == after) {
            ++rep.agreements;
        } else {
            rep.add_failure({e, none, before, after, "edited from " + format_word(w)});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Random formulas

namespace {

class FormulaGen {
public:
    FormulaGen(std::mt19937_64& rng, std::string letters, char neutral, bool ad_inner)
        : rng_(rng), letters_(non_neutral(letters, neutral)), neutral_(neutral), ad_inner_(ad_inner) {}

    void pick_free_and_moduli() {
        free_.clear();
        moduli_.clear();
        int nf = pick(3);
        if (nf == 1) free_.push_back(coin(0.5) ? "x" : "y");
        if (nf == 2) free_ = {"x", "y"};
        int nm = pick(3);
        if (nm == 1) moduli_.push_back(coin(0.5) ? 2 : 3);
        if (nm == 2) moduli_ = {2, 3};
    }

    std::string top(int depth) {
        pick_free_and_moduli();
        auto q = quant("z", depth, free_, false, false);
        switch (pick(5)) {
            case 0:
                return "!(" + q + ")";
            case 1:
                if (free_.size() == 2) return "(" + q + ") & x < y";
                return q;
            case 2:
                return "(" + q + ") | (" + quant("u", 1, free_, false, false) + ")";
            default:
                return q;
        }
    }

    const std::vector<std::string>& free() const { return free_; }

    std::string quant(const std::string& v, int depth, const std::vector<std::string>& others, bool group_only,
                      bool inner) {
        static const char* names[] = {"U1", "C2", "C3", "S3"};
        static const int weights[] = {3, 3, 2, 2};
        std::discrete_distribution<int> which(group_only ? std::begin(weights) + 1 : std::begin(weights),
                                              std::end(weights));
        std::string name = names[which(rng_) + (group_only ? 1 : 0)];
        auto M = builtin_monoid(name);
        const int order = M->size();
        std::vector<int> mods;
        for (int m : moduli_) {
            if (m * order <= 12) mods.push_back(m);
        }
        int mod = mods.empty() || coin(0.3) ? 0 : mods[static_cast<std::size_t>(pick(static_cast<int>(mods.size())))];
        bool doubled = std::lcm(std::max(mod, 1), 2) * order <= 12;

        const int K = M->arity();
        int nontrivial = 1;
        if (K >= 2) nontrivial += pick(std::min(K, 3));
        std::vector<int> slots(static_cast<std::size_t>(K));
        std::iota(slots.begin(), slots.end(), 0);
        std::shuffle(slots.begin(), slots.end(), rng_);
        std::vector<std::string> bodies(static_cast<std::size_t>(K), "false");
        auto inner_others = others;
        inner_others.push_back(v);
        for (int i = 0; i < nontrivial; ++i) {
            bodies[static_cast<std::size_t>(slots[static_cast<std::size_t>(i)])] =
                body(v, depth, others, inner_others, mod, doubled);
        }
        std::string guard;
        if (inner ? (ad_inner_ || coin(0.5)) : coin(0.15)) guard = "[!'" + std::string(1, neutral_) + "'(" + v + ")] ";
        std::string out = "Q{" + name + "," + M->element_name(static_cast<Element>(pick(M->size()))) + "} " + v + " " +
                          guard + ". < ";
        for (std::size_t i = 0; i < bodies.size(); ++i) out += (i ? ", " : "") + bodies[i];
        return out + " >";
    }

private:
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
    bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

    std::string other_term(const std::vector<std::string>& others) {
        if (others.empty() || coin(0.15)) return std::to_string(pick(4));
        const auto& o = others[static_cast<std::size_t>(pick(static_cast<int>(others.size())))];
        if (coin(0.2)) return o + " + 1";
        if (coin(0.08)) return o + " + " + o;
        if (others.size() > 1 && coin(0.15)) {
            const auto& o2 = others[static_cast<std::size_t>(pick(static_cast<int>(others.size())))];
            if (o2 != o) return o + " + " + o2;
        }
        return o;
    }

    std::string atom(const std::string& v, const std::vector<std::string>& others, int mod, bool doubled) {
        double roll = std::uniform_real_distribution<double>(0, 1)(rng_);
        if (roll < 0.35) {
            std::string c(1, letters_[static_cast<std::size_t>(pick(static_cast<int>(letters_.size())))]);
            return "'" + c + "'(" + v + (coin(0.12) ? " + 1" : "") + ")";
        }
        if (mod > 0 && roll < 0.55) {
            std::string rhs = others.empty() || coin(0.5) ? std::to_string(pick(mod)) : other_term(others);
            return v + " =mod " + std::to_string(mod) + " " + rhs;
        }
        std::string lhs = doubled && coin(0.25) ? v + " + " + v : v;
        static const char* ops[] = {" < ", " > ", " = "};
        return lhs + ops[pick(3)] + other_term(others);
    }

    std::string body(const std::string& v, int depth, const std::vector<std::string>& others,
                     const std::vector<std::string>& inner_others, int mod, bool doubled) {
        const int n = 1 + (coin(0.5) ? 1 : 0);
        std::string out;
        const char* join = coin(0.7) ? " & " : " | ";
        for (int i = 0; i < n; ++i) {
            std::string lit;
            if (depth > 1 && coin(0.4)) {
                lit = "(" + quant(inner_name(), depth - 1, inner_others, false, true) + ")";
            } else {
                lit = atom(v, others, mod, doubled);
            }
            if (coin(0.25)) lit = "!(" + lit + ")";
            out += (i ? join : "") + lit;
        }
        return n > 1 ? "(" + out + ")" : out;
    }

    std::string inner_name() { return "v" + std::to_string(next_++); }

    std::mt19937_64& rng_;
    std::vector<char> letters_;
    char neutral_;
    bool ad_inner_;
    std::vector<std::string> free_;
    std::vector<int> moduli_;
    int next_ = 0;
};

}  // namespace

FormulaPtr random_formula(std::mt19937_64& rng, const CorpusConfig& config) {
    FormulaGen gen(rng, config.letters, config.neutral, false);
    return parse(gen.top(std::max(1, config.max_depth)));
}

std::vector<CorpusEntry> generate_corpus(const CorpusConfig& config, CorpusStats* stats) {
    std::mt19937_64 rng(config.seed);
    std::vector<CorpusEntry> out;
    CorpusStats st;
    CollapseOptions opts;
    opts.neutral = config.neutral;
    opts.params = config.params;
    while (out.size() < config.count) {
        bool placed = false;
        for (int attempt = 0; attempt < config.attempts && !placed; ++attempt) {
            auto f = random_formula(rng, config);
            try {
                auto c = collapse(f, opts);
                const Kind k = c.formula->kind();
                if (config.reject_constant && (k == Kind::True || k == Kind::False)) {
                    ++st.constant;
                    continue;
                }
                out.push_back({f, std::move(c)});
                placed = true;
            } catch (const Error& e) {
                if (e.code() != Errc::SizeCap) throw;
                ++st.size_cap;
            }
        }
        if (!placed) throw Error(Errc::SizeCap, "corpus generator could not place a formula within the caps");
    }
    if (stats) *stats = st;
    return out;
}

// ---------------------------------------------------------------------------
// Sorting tree checks

bool tree_check(Value t, const std::vector<Value>& nnp, const TreeParams& params, TreeCheck which, std::string* note) {
    auto fail = [&](const std::string& why) {
        if (note) *note = why;
        return false;
    };
    auto root = build_tree(t, nnp, params);
    if (which == TreeCheck::Separation) {
        if (!check_child_bounds(*root, params)) return fail("child bounds violated");
        if (!check_neighbor_separation(*root)) return fail("siblings overlap");
        return true;
    }
    auto seq = leaves(*root);
    if (!std::is_sorted(seq.begin(), seq.end())) return fail("leaves out of order");
    CollapseContext ctx;
    ctx.s = params.s;
    ctx.delta = params.delta;
    ctx.T = {LinearTerm::constant(t)};
    ctx.F = {extended_functions(params.s, params.delta, 0)};
    WordModel w('_');
    for (Value p : nnp) w.set(p, 'a');
    auto B = boundary_points(w, {}, ctx);
    std::set<Value> from_tree;
    for (Value v : seq) {
        if (v >= 0) from_tree.insert(v);
    }
    std::set<Value> expected(B.per_offset()[0].begin(), B.per_offset()[0].end());
    if (from_tree != expected) return fail("leaf set differs from B_t");
    return true;
}

// ---------------------------------------------------------------------------
// Lemma suites

namespace {

struct BodyInstance {
    MonoidPtr M;
    VarId z = 0;
    std::vector<FormulaPtr> bodies;
    CollapseContext ctx;
    WordModel word;
    Assignment assignment;
    Value r = 0;
};

class InstanceSource {
public:
    InstanceSource(const SuiteConfig& c, bool group_only) : c_(c), rng_(c.seed), group_only_(group_only) {}

    BodyInstance next(std::size_t index) {
        for (;;) {
            FormulaGen gen(rng_, c_.letters, c_.neutral, !c_.allow_non_active_domain);
            gen.pick_free_and_moduli();
            auto q = parse(gen.quant("z", c_.depth, gen.free(), group_only_, false));
            BodyInstance inst;
            inst.M = q->monoid();
            inst.z = q->bound_var();
            std::vector<FormulaPtr> bodies;
            for (auto& b : q->bodies()) bodies.push_back(f_and(q->guard(), b));
            auto nb = normalize_bodies(bodies, inst.z, LetterTrick{c_.neutral, inst.M});
            inst.bodies = nb.bodies;
            std::vector<VarId> free;
            for (auto& b : inst.bodies) {
                for (VarId v : b->free_vars()) {
                    if (v != inst.z) free.push_back(v);
                }
            }
            std::sort(free.begin(), free.end());
            free.erase(std::unique(free.begin(), free.end()), free.end());
            ParamOptions po;
            po.family = c_.family;
            try {
                inst.ctx = collapse_params(inst.bodies, inst.z, free, inst.M->size(), 2, po);
            } catch (const Error& e) {
                if (e.code() == Errc::SizeCap) continue;
                throw;
            }
            inst.r = inst.ctx.rphi + c_.extra_r + static_cast<Value>(index % 2);
            int exps = 0;
            for (Value x = inst.r; exps < c_.max_exp && x <= c_.max_position; x *= inst.r) ++exps;
            exps = std::max(exps, 1);
            DomainDr d{inst.r, exps};
            std::uniform_int_distribution<int> count(0, std::min(exps, 4));
            inst.word = sample_word(d, Alphabet::of(c_.letters, c_.neutral), count(rng_), rng_());
            inst.assignment = random_assignment(free, d.elements(), rng_);
            return inst;
        }
    }

private:
    const SuiteConfig& c_;
    std::mt19937_64 rng_;
    bool group_only_;
};

// Prefix products: prefix[i] = u(0) ... u(i-1).
std::vector<Element> prefix_products(const MonoidTable& G, const std::function<Element(Value)>& u, Value upto) {
    std::vector<Element> prefix{G.identity()};
    for (Value i = 0; i < upto; ++i) prefix.push_back(G.mul(prefix.back(), u(i)));
    return prefix;
}

Element between(const MonoidTable& G, const std::vector<Element>& prefix, Value from, Value to) {
    // u(from) ... u(to - 1)
    if (to <= from) return G.identity();
    return G.mul(G.inverse(prefix[static_cast<std::size_t>(from)]), prefix[static_cast<std::size_t>(to)]);
}

Counterexample instance_failure(const BodyInstance& inst, const std::string& note) {
    return {inst.word, inst.assignment, OmegaVerdict::True, OmegaVerdict::False, note};
}

// Enumerates every assignment of rho's bound variables into nnp, with repetition.
bool rho_values_in_boundary(const BodyInstance& inst, const BoundarySet& B, std::string* note) {
    const auto nnp = inst.word.nnp();
    const auto& free = inst.ctx.free_vars;
    for (auto& rho : inst.ctx.R) {
        std::vector<std::pair<VarId, Value>> bound;
        Value base = rho.constant_part();
        for (auto& [v, c] : rho.terms()) {
            if (std::binary_search(free.begin(), free.end(), v)) {
                base = checked_add(base, checked_mul(c, inst.assignment.at(v)));
            } else {
                bound.emplace_back(v, c);
            }
        }
        if (!bound.empty() && nnp.empty()) continue;
        std::vector<std::size_t> idx(bound.size(), 0);
        for (;;) {
            Value val = base;
            for (std::size_t i = 0; i < bound.size(); ++i) val = checked_add(val, checked_mul(bound[i].second, nnp[idx[i]]));
            if (val >= 0 && !B.contains(val)) {
                if (note) *note = "value " + to_string(val) + " of " + print_term(rho) + " missing from B";
                return false;
            }
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] == nnp.size()) idx[i++] = 0;
            if (i == idx.size()) break;
        }
    }
    return true;
}

bool has_identity_function(const CollapseContext& ctx) {
    for (std::size_t k = 0; k < ctx.T.size(); ++k) {
        if (ctx.T[k] != LinearTerm()) continue;
        for (auto& f : ctx.F[k]) {
            if (f.coeffs == std::vector<Value>{1}) return true;
        }
    }
    return false;
}

using Check = std::function<std::optional<bool>(const BodyInstance&, std::string*)>;

EquivReport run_body_suite(const SuiteConfig& c, bool group_only, const Check& check) {
    InstanceSource src(c, group_only);
    EquivReport rep;
    const std::size_t max_attempts = std::max<std::size_t>(c.instances * 20, 100);
    for (std::size_t attempt = 0; rep.total < c.instances && attempt < max_attempts; ++attempt) {
        auto inst = src.next(attempt);
        std::string note;
        auto ok = check(inst, &note);
        if (!ok) {
            ++rep.skipped;
            continue;
        }
        ++rep.total;
        if (*ok) {
            ++rep.agreements;
        } else {
            rep.add_failure(instance_failure(inst, note), c.keep_counterexamples);
        }
    }
    return rep;
}

std::optional<bool> check_inclusion(const BodyInstance& inst, std::string* note) {
    auto B = boundary_points(inst.word, inst.assignment, inst.ctx);
    if (!rho_values_in_boundary(inst, B, note)) return false;
    if (has_identity_function(inst.ctx)) {
        for (Value p : inst.word.nnp()) {
            if (!B.contains(p)) {
                *note = "position " + to_string(p) + " missing from B";
                return false;
            }
        }
    }
    return true;
}

std::optional<bool> check_periodicity(const BodyInstance& inst, std::string* note, std::uint64_t seed, char neutral) {
    for (auto& b : inst.bodies) {
        if (!is_active_domain(b, neutral)) return std::nullopt;
    }
    auto B = boundary_points(inst.word, inst.assignment, inst.ctx);
    const Value q = inst.ctx.q;
    const auto& pts = B.points();
    std::mt19937_64 rng(seed);
    Evaluator ev(inst.word, Evaluator::Mode::Exact);
    Assignment a = inst.assignment;
    // Gaps (b_i, b_{i+1}) and the start of the infinite interval.
    for (std::size_t g = 0; g <= pts.size(); ++g) {
        const Value lo = g == 0 ? 0 : pts[g - 1] + 1;
        const Value hi = g < pts.size() ? pts[g] - 1 : lo + 6 * q - 1;
        if (hi < lo) continue;
        std::vector<Value> probe;
        if (hi - lo + 1 <= 6 * q) {
            for (Value x = lo; x <= hi; ++x) probe.push_back(x);
        } else {
            for (Value x = 0; x < 2 * q; ++x) {
                probe.push_back(lo + x);
                probe.push_back(hi - x);
            }
            std::uniform_int_distribution<long long> mid(0, static_cast<long long>(hi - lo));
            for (Value x = 0; x < 2 * q; ++x) probe.push_back(lo + static_cast<Value>(mid(rng)));
        }
        for (std::size_t i = 0; i < inst.bodies.size(); ++i) {
            std::map<Value, std::pair<Value, bool>> seen;
            for (Value x : probe) {
                a[inst.z] = x;
                bool v = ev.eval(inst.bodies[i], a);
                auto [it, fresh] = seen.emplace(mod_floor(x, q), std::make_pair(x, v));
                if (!fresh && it->second.second != v) {
                    *note = "body " + std::to_string(i + 1) + " differs at " + to_string(it->second.first) + " and " +
                            to_string(x);
                    return false;
                }
            }
        }
    }
    return true;
}

struct ProductSetup {
    BoundarySet B;
    std::unique_ptr<Evaluator> ev;
    std::function<Element(Value)> u;
};

ProductSetup product_setup(const BodyInstance& inst) {
    ProductSetup s;
    s.B = boundary_points(inst.word, inst.assignment, inst.ctx);
    s.ev = std::make_unique<Evaluator>(inst.word, Evaluator::Mode::Exact);
    Evaluator* ev = s.ev.get();
    const auto* bodies = &inst.bodies;
    const MonoidTable* G = inst.M.get();
    const VarId z = inst.z;
    const Assignment a = inst.assignment;
    s.u = [ev, bodies, G, z, a](Value i) { return ev->u_value(*bodies, *G, z, i, a); };
    return s;
}

std::optional<bool> check_interval_product(const BodyInstance& inst, std::string* note) {
    auto s = product_setup(inst);
    const MonoidTable& G = *inst.M;
    const auto& pts = s.B.points();
    auto prefix = prefix_products(G, s.u, pts.back() + 1);
    NkOracle o(s.B, G, s.u, inst.ctx.p);
    const int L = o.levels();
    for (int k = 0; k <= L; ++k) {
        std::vector<Value> higher;
        for (int i = k; i < L; ++i) {
            for (Value c : s.B.per_offset()[static_cast<std::size_t>(i)]) higher.push_back(c);
        }
        std::sort(higher.begin(), higher.end());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                const Value b = pts[i], b2 = pts[j];
                auto it = std::upper_bound(higher.begin(), higher.end(), b);
                if (it != higher.end() && *it < b2) break;
                Element lhs = G.mul(o.n(k, b), G.inverse(o.nhat(k, b2)));
                if (lhs != between(G, prefix, b + 1, b2)) {
                    *note = "k=" + std::to_string(k) + " b=" + to_string(b) + " b'=" + to_string(b2);
                    return false;
                }
            }
        }
    }
    return true;
}

std::optional<bool> check_total_product(const BodyInstance& inst, std::string* note) {
    auto s = product_setup(inst);
    const MonoidTable& G = *inst.M;
    const Value top = s.B.points().back();
    // The product over N exists only when the infinite interval contributes identities.
    for (Value i = top + 1; i <= top + inst.ctx.q; ++i) {
        if (s.u(i) != G.identity()) return std::nullopt;
    }
    auto prefix = prefix_products(G, s.u, top + 1);
    NkOracle o(s.B, G, s.u, inst.ctx.p);
    Element lhs = G.mul(s.u(0), o.n(o.levels(), 0));
    if (lhs != prefix.back()) {
        *note = "u(0) N(0) = " + G.element_name(lhs) + " but the product is " + G.element_name(prefix.back());
        return false;
    }
    return true;
}

EquivReport run_tree_suite(const SuiteConfig& c, TreeCheck which) {
    EquivReport rep;
    auto record = [&](bool ok, const std::vector<Value>& nnp, const std::string& note) {
        ++rep.total;
        if (ok) {
            ++rep.agreements;
            return;
        }
        WordModel w(c.neutral);
        for (Value p : nnp) w.set(p, 'a');
        rep.add_failure({w, {}, OmegaVerdict::True, OmegaVerdict::False, note}, c.keep_counterexamples);
    };
    // The three-point instance: x - 2y at x = 625, y = 25 is a leaf of value 575.
    {
        TreeParams three{2, 2, 5, true};
        std::vector<Value> nnp{5, 25, 625};
        std::string note;
        bool ok = tree_check(0, nnp, three, which, &note);
        if (ok && which == TreeCheck::Order) {
            auto seq = leaves(*build_tree(0, nnp, three));
            if (std::find(seq.begin(), seq.end(), Value{575}) == seq.end()) {
                ok = false;
                note = "leaf 575 missing";
            }
        }
        record(ok, nnp, note);
    }
    std::mt19937_64 rng(c.seed);
    while (rep.total < c.instances) {
        TreeParams p;
        p.s = 1 + static_cast<int>(rng() % 3);
        p.delta = p.s * static_cast<Value>(1 + rng() % 2);
        p.r = 3 * p.s * p.delta + 1 + static_cast<Value>(rng() % 3);
        const int exps = 4;
        DomainDr d{p.r, exps};
        auto dom = d.elements();
        std::shuffle(dom.begin(), dom.end(), rng);
        dom.resize(rng() % (p.s == 3 ? 4 : 5));
        const Value t = static_cast<Value>(rng() % static_cast<std::uint64_t>(3 * p.r));
        std::string note;
        record(tree_check(t, dom, p, which, &note), dom, note);
    }
    return rep;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"boundary-inclusion", "interval-periodicity", "interval-product",
                                                "total-product",      "tree-order",           "separation"};
    return names;
}

EquivReport lemma_suite(std::string_view name, const SuiteConfig& config) {
    if (name == "boundary-inclusion") return run_body_suite(config, false, check_inclusion);
    if (name == "interval-periodicity") {
        std::uint64_t seed = config.seed;
        char neutral = config.neutral;
        return run_body_suite(config, false, [&seed, neutral](const BodyInstance& inst, std::string* note) {
            return check_periodicity(inst, note, seed++, neutral);
        });
    }
    if (name == "interval-product") return run_body_suite(config, true, check_interval_product);
    if (name == "total-product") return run_body_suite(config, true, check_total_product);
    if (name == "tree-order") return run_tree_suite(config, TreeCheck::Order);
    if (name == "separation") return run_tree_suite(config, TreeCheck::Separation);
    throw Error(Errc::UnknownSuite, "unknown suite: " + std::string(name));
}

}  // namespace adc

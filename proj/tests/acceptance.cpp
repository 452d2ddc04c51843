// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "adc/harness.hpp"

using namespace adc;

namespace {

constexpr std::size_t kCorpusSize = 50;
constexpr std::size_t kSamplesPerRadix = 100;
constexpr double kCorpusSeconds = 600.0;
constexpr std::size_t kTotalProductInstances = 100;
constexpr std::size_t kIntervalProductInstances = 50;
constexpr std::size_t kTreeInstances = 100;
constexpr std::size_t kBodyInstances = 100;
constexpr int kRamseyExp = 8;
constexpr std::size_t kRamseySupport = 3;
constexpr std::size_t kInvarianceTrials = 1000;
constexpr std::size_t kParityWords = 200;
constexpr int kParityLength = 40;
constexpr int kParityExp = 48;

const char* kParity = "Q{C2,1} z . < ('1'(z) & E y . (y + y = z)) | ('1'(z) & !(E y . (y + y = z))) >";

int failed = 0;

void report(int n, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string counts(const EquivReport& r) {
    return "total " + std::to_string(r.total) + ", failures " + std::to_string(r.failures()) + ", nonconvergent " +
           std::to_string(r.nonconvergent);
}

EquivReport run_suite(const char* name, std::size_t instances) {
    SuiteConfig sc;
    sc.instances = instances;
    sc.seed = 2024;
    return lemma_suite(name, sc);
}

bool suite_ok(const EquivReport& r, std::size_t min_total) {
    return r.consistent() && r.total >= min_total && r.failures() == 0 && r.nonconvergent == 0;
}

// Words with support of size at most `k` inside Y, every labeling by `letters`.
std::vector<WordModel> small_words(const std::vector<Value>& Y, std::size_t k, const std::string& letters, char neutral) {
    std::vector<WordModel> out;
    const std::size_t n = Y.size();
    for (std::size_t size = 0; size <= std::min(k, n); ++size) {
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
        do {
            std::vector<Value> pos;
            for (std::size_t i = 0; i < n; ++i) {
                if (pick[i]) pos.push_back(Y[i]);
            }
            std::size_t labelings = 1;
            for (std::size_t i = 0; i < size; ++i) labelings *= letters.size();
            for (std::size_t code = 0; code < labelings; ++code) {
                WordModel w(neutral);
                std::size_t c = code;
                for (Value p : pos) {
                    w.set(p, letters[c % letters.size()]);
                    c /= letters.size();
                }
                out.push_back(std::move(w));
            }
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    return out;
}

// Disagreements of f and g over all words above and all assignments of their free variables from Y.
std::size_t ramsey_disagreements(const FormulaPtr& f, const FormulaPtr& g, const std::vector<Value>& Y,
                                 std::size_t* checked) {
    std::vector<VarId> vars = f->free_vars();
    for (VarId v : g->free_vars()) {
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    std::size_t bad = 0;
    for (auto& w : small_words(Y, kRamseySupport, "ab", '_')) {
        Evaluator ef(w, Evaluator::Mode::Exact), eg(w, Evaluator::Mode::Exact);
        std::vector<std::size_t> idx(vars.size(), 0);
        for (;;) {
            Assignment a;
            for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = Y[idx[i]];
            ++*checked;
            if (ef.eval(f, a) != eg.eval(g, a)) ++bad;
            std::size_t i = 0;
            while (i < vars.size() && ++idx[i] == Y.size()) idx[i++] = 0;
            if (i == vars.size()) break;
        }
    }
    return bad;
}

}  // namespace

int main() {
    CorpusConfig cc;
    cc.count = kCorpusSize;
    cc.seed = 1;

    // 1. Collapse soundness.
    std::vector<CorpusEntry> corpus;
    {
        auto t0 = std::chrono::steady_clock::now();
        CorpusStats st;
        corpus = generate_corpus(cc, &st);
        EquivReport all;
        bool shape = corpus.size() >= kCorpusSize;
        for (auto& e : corpus) {
            shape = shape && quantifier_depth(e.formula) <= 2 && e.formula->free_vars().size() <= 2;
            SamplerConfig sc;
            sc.seed = 7;
            sc.radices = {e.collapsed.threshold, e.collapsed.threshold + 1};
            sc.samples_per_r = kSamplesPerRadix;
            auto rep = equivalence_check(e.formula, e.collapsed.formula, sc);
            shape = shape && rep.total >= 2 * kSamplesPerRadix;
            all.merge(rep);
        }
        const double dt = seconds_since(t0);
        const bool ok = shape && all.consistent() && all.failures() == 0 && all.rhs_nonconvergent == 0 &&
                        all.nonconvergent == 0 && dt <= kCorpusSeconds;
        report(1, ok,
               "collapse soundness, " + std::to_string(corpus.size()) + " formulas, " + counts(all) +
                   ", rhs nonconvergent " + std::to_string(all.rhs_nonconvergent) + ", " + std::to_string(dt) +
                   " s (limit " + std::to_string(kCorpusSeconds) + ")");
        if (!all.counterexamples.empty()) {
            auto& c = all.counterexamples.front();
            std::printf("  first counterexample: %s\n", format_word(c.word).c_str());
        }
    }

    // 2. Total product.
    {
        auto r = run_suite("total-product", kTotalProductInstances);
        report(2, suite_ok(r, kTotalProductInstances), "total-product identity, " + counts(r));
    }

    // 3. Interval product.
    {
        auto r = run_suite("interval-product", kIntervalProductInstances);
        report(3, suite_ok(r, kIntervalProductInstances), "interval-product identity, " + counts(r));
    }

    // 4. Sorting tree.
    {
        const TreeParams three{2, 2, 5, true};
        std::string note;
        bool three_ok = tree_check(0, {5, 25, 625}, three, TreeCheck::Order, &note) &&
                        tree_check(0, {5, 25, 625}, three, TreeCheck::Separation, &note);
        auto seq = leaves(*build_tree(0, {5, 25, 625}, three));
        const bool has_575 = std::find(seq.begin(), seq.end(), 575) != seq.end();
        auto order = run_suite("tree-order", kTreeInstances);
        auto sep = run_suite("separation", kTreeInstances);
        report(4, three_ok && has_575 && suite_ok(order, kTreeInstances) && suite_ok(sep, kTreeInstances),
               std::string("sorting tree, three-point instance ") + (three_ok ? "ok" : "failed " + note) + ", leaf 575 " +
                   (has_575 ? "present" : "missing") + ", order " + counts(order) + ", separation " + counts(sep));
    }

    // 5. Boundary inclusion and interval periodicity.
    {
        auto inc = run_suite("boundary-inclusion", kBodyInstances);
        auto per = run_suite("interval-periodicity", kBodyInstances);
        report(5, suite_ok(inc, kBodyInstances) && suite_ok(per, kBodyInstances),
               "boundary inclusion " + counts(inc) + ", interval periodicity " + counts(per));
    }

    // 6. Ramsey reduction of every collapsed formula.
    {
        std::size_t bad = 0, checked = 0, not_order = 0, errors = 0;
        for (auto& e : corpus) {
            try {
                auto X = DomainDr{e.collapsed.threshold, kRamseyExp}.elements();
                auto rr = ramsey_reduce(e.collapsed.formula, X);
                if (!is_order_only(rr.formula)) ++not_order;
                bad += ramsey_disagreements(e.collapsed.formula, rr.formula, rr.Y, &checked);
            } catch (const Error& err) {
                ++errors;
                std::printf("  ramsey error: %s\n", err.what());
            }
        }
        report(6, bad == 0 && not_order == 0 && errors == 0 && checked > 0,
               "ramsey reduction, " + std::to_string(corpus.size()) + " formulas, " + std::to_string(checked) +
                   " instances, disagreements " + std::to_string(bad) + ", not order-only " +
                   std::to_string(not_order) + ", errors " + std::to_string(errors));
    }

    // 7. Neutral-letter invariance of pipeline outputs.
    {
        EquivReport all;
        std::size_t sentences = 0, errors = 0;
        auto check = [&](const FormulaPtr& f, PipelineOptions po, InvarianceConfig ic) {
            try {
                auto pr = pipeline(f, po);
                ic.trials = kInvarianceTrials;
                auto rep = neutral_invariance_check(pr.reduced.formula, ic);
                all.merge(rep);
                ++sentences;
            } catch (const Error& err) {
                ++errors;
                std::printf("  invariance error: %s\n", err.what());
            }
        };
        for (auto& e : corpus) {
            if (!e.formula->free_vars().empty()) continue;
            check(e.formula, PipelineOptions{}, InvarianceConfig{});
        }
        PipelineOptions po;
        po.collapse.neutral = '0';
        InvarianceConfig ic;
        ic.letters = "1";
        ic.neutral = '0';
        check(parse(kParity), po, ic);
        report(7, errors == 0 && sentences >= 2 && all.consistent() && all.passed() &&
                      all.total == sentences * kInvarianceTrials,
               "neutral-letter invariance, " + std::to_string(sentences) + " sentences, " + counts(all) + ", errors " +
                   std::to_string(errors));
    }

    // 8. Parity end to end.
    {
        std::size_t agree = 0, total = 0;
        std::string detail;
        try {
            PipelineOptions po;
            po.collapse.neutral = '0';
            po.max_exp = kParityExp;
            auto pr = pipeline(parse(kParity), po);
            const auto& psi = pr.reduced.formula;
            const bool shape = is_order_only(psi) && is_active_domain(psi, '0') && psi->free_vars().empty();
            std::mt19937_64 rng(40);
            std::uniform_int_distribution<int> length(0, kParityLength);
            for (std::size_t t = 0; t < kParityWords; ++t) {
                WordModel w('0');
                int ones = 0;
                const int len = length(rng);
                for (int i = 0; i < len; ++i) {
                    if (rng() % 2) {
                        w.set(i, '1');
                        ++ones;
                    }
                }
                auto e = embed_order_preserving(w, pr.reduced.Y);
                ++total;
                if (eval_exact(psi, e, {}) == (ones % 2 == 0)) ++agree;
            }
            detail = std::string("order-only sentence ") + (shape ? "yes" : "no") + ", |Y| " +
                     std::to_string(pr.reduced.Y.size());
            report(8, shape && total == kParityWords && agree == total,
                   "parity demo, agreement " + std::to_string(agree) + "/" + std::to_string(total) + ", " + detail);
        } catch (const Error& err) {
            report(8, false, std::string("parity demo raised ") + err.what());
        }
    }

    return failed == 0 ? 0 : 1;
}

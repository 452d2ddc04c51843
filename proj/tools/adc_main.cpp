#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "adc/collapse.hpp"
#include "adc/harness.hpp"
#include "json.hpp"

using namespace adc;
using nlohmann::json;

namespace {

struct Common {
    std::vector<std::string> monoid_files;
    std::string format = "text";
    char neutral = '_';
    std::uint64_t seed = 1;
    MonoidRegistry registry;

    bool as_json() const { return format == "json"; }
    FormulaPtr formula(const std::string& text) const { return parse(text, registry); }
};

std::string show(Value v) { return to_string(v); }

Assignment parse_assignment(const std::string& text) {
    Assignment a;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto eq = part.find('=');
        if (eq == std::string::npos) throw Error(Errc::InvalidArgument, "assignment needs var=value, got '" + part + "'");
        auto name = part.substr(0, eq);
        name.erase(0, name.find_first_not_of(' '));
        name.erase(name.find_last_not_of(' ') + 1);
        a[var(name)] = parse_value(part.substr(eq + 1));
    }
    return a;
}

std::vector<Value> parse_values(const std::string& text) {
    std::vector<Value> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (!part.empty()) out.push_back(parse_value(part));
    }
    return out;
}

json assignment_json(const Assignment& a) {
    json j = json::object();
    for (auto& [v, x] : a) j[var_name(v)] = show(x);
    return j;
}

std::string assignment_text(const Assignment& a) {
    std::string out;
    for (auto& [v, x] : a) out += (out.empty() ? "" : ",") + var_name(v) + "=" + show(x);
    return out;
}

json report_json(const EquivReport& r) {
    json j{{"total", r.total},
           {"agreements", r.agreements},
           {"nonconvergent", r.nonconvergent},
           {"skipped", r.skipped},
           {"failures", r.failures()}};
    json ces = json::array();
    for (auto& c : r.counterexamples) {
        ces.push_back({{"word", format_word(c.word)},
                       {"assignment", assignment_json(c.assignment)},
                       {"lhs", verdict_name(c.lhs)},
                       {"rhs", verdict_name(c.rhs)},
                       {"note", c.note}});
    }
    j["counterexamples"] = ces;
    return j;
}

int print_report(const Common& c, const std::string& title, const EquivReport& r) {
    if (c.as_json()) {
        auto j = report_json(r);
        j["name"] = title;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << title << ": total " << r.total << ", agreements " << r.agreements << ", counterexamples "
                  << r.failures() << ", nonconvergent " << r.nonconvergent << ", skipped " << r.skipped << '\n';
        for (auto& ce : r.counterexamples) {
            std::cout << "  " << format_word(ce.word);
            if (!ce.assignment.empty()) std::cout << " [" << assignment_text(ce.assignment) << "]";
            std::cout << " lhs=" << verdict_name(ce.lhs) << " rhs=" << verdict_name(ce.rhs);
            if (!ce.note.empty()) std::cout << " (" << ce.note << ")";
            std::cout << '\n';
        }
    }
    return r.failures() == 0 ? 0 : 1;
}

MonoidPtr trick_monoid(const FormulaPtr& f) {
    MonoidPtr m;
    for_each_node(f, [&](const FormulaPtr& x) {
        if (!m && x->kind() == Kind::Quant) m = x->monoid();
    });
    return m ? m : builtin_monoid("C2");
}

FamilyKind family_of(const std::string& name) {
    if (name == "full") return FamilyKind::Full;
    if (name == "merged") return FamilyKind::Merged;
    throw Error(Errc::InvalidArgument, "family must be full or merged");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active-domain collapse of monoid-quantifier formulas over words with a neutral letter"};
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    std::string neutral = "_";
    app.add_option("--monoid-file", c.monoid_files, "JSON monoid definition (repeatable)");
    app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--neutral", neutral, "Neutral letter");
    app.add_option("--seed", c.seed, "Random seed");

    std::string formula, formula2, word, assign, family = "merged", nnp_text, radices;
    std::string horizon;
    std::string letters = "ab";
    std::string z = "z";
    long long r = 0, t = 0, delta = 1;
    int max_exp = 8, s = 1, samples = 100, trials = 1000;
    std::size_t instances = 100;
    bool trace = false, relaxed = false;

    auto* eval = app.add_subcommand("eval", "Evaluate a formula on a word");
    eval->add_option("formula", formula)->required();
    eval->add_option("--word", word, "Word, e.g. 'neutral=_; w={5:a,25:b}' or '..a.b'")->required();
    eval->add_option("--assign", assign, "Free variables, e.g. x=5,y=25");
    eval->add_option("--horizon", horizon, "Finite horizon; omitted means the infinite word");

    auto* norm = app.add_subcommand("normalize", "Normal form of a formula for one variable");
    norm->add_option("formula", formula)->required();
    norm->add_option("--var", z, "Pivot variable");

    auto* bnd = app.add_subcommand("boundary", "Boundary points of a quantifier's bodies");
    bnd->add_option("formula", formula, "A quantifier Q{G,m} z . <...>")->required();
    bnd->add_option("--word", word)->required();
    bnd->add_option("--assign", assign);
    bnd->add_option("--family", family)->check(CLI::IsMember({"full", "merged"}));

    auto* tree = app.add_subcommand("tree-dump", "Render a sorting tree");
    tree->add_option("--t", t, "Offset");
    tree->add_option("--nnp", nnp_text, "Non-neutral positions, e.g. 5,25,625")->required();
    tree->add_option("--s", s, "Maximum number of variables");
    tree->add_option("--delta", delta, "Coefficient bound");
    tree->add_option("--r", r, "Base")->required();
    tree->add_flag("--relaxed", relaxed, "Only require r > 2*delta");

    auto* col = app.add_subcommand("collapse", "Collapse to an active-domain formula");
    col->add_option("formula", formula)->required();
    col->add_flag("--trace", trace, "Dump the named intermediate formulas");
    col->add_option("--family", family)->check(CLI::IsMember({"full", "merged"}));

    auto* ram = app.add_subcommand("ramsey", "Replace numeric atoms by order types on a subset of D_r");
    ram->add_option("formula", formula)->required();
    ram->add_option("--r", r, "Base")->required();
    ram->add_option("--max-exp", max_exp, "Exponents of D_r");

    auto* pipe = app.add_subcommand("pipeline", "Collapse, then reduce to an order-only formula");
    pipe->add_option("formula", formula)->required();
    pipe->add_option("--r", r, "Base; defaults to the collapse threshold");
    pipe->add_option("--max-exp", max_exp, "Exponents of D_r");
    pipe->add_flag("--trace", trace);

    auto* eq = app.add_subcommand("equiv", "Compare two formulas on sampled words");
    eq->add_option("lhs", formula)->required();
    eq->add_option("rhs", formula2)->required();
    eq->add_option("--r", radices, "Bases, e.g. 4,5")->required();
    eq->add_option("--max-exp", max_exp);
    eq->add_option("--samples", samples, "Samples per base");
    eq->add_option("--letters", letters, "Non-neutral letters");

    std::string suite_name;
    auto* suite = app.add_subcommand("suite", "Run a lemma suite");
    suite->add_option("name", suite_name, "One of the lemma suites")->required();
    suite->add_option("--instances", instances);
    suite->add_option("--max-exp", max_exp);
    suite->add_option("--family", family)->check(CLI::IsMember({"full", "merged"}));

    auto* inv = app.add_subcommand("invariance", "Neutral-letter invariance of an order-only sentence");
    inv->add_option("formula", formula)->required();
    inv->add_option("--trials", trials);
    inv->add_option("--letters", letters, "Non-neutral letters");

    CLI11_PARSE(app, argc, argv);

    try {
        if (neutral.size() != 1) throw Error(Errc::InvalidArgument, "--neutral takes one character");
        c.neutral = neutral[0];
        for (auto& f : c.monoid_files) c.registry.load_file(f);

        if (eval->parsed()) {
            auto f = c.formula(formula);
            auto w = parse_word(word, c.neutral);
            auto a = parse_assignment(assign);
            std::string verdict;
            if (!horizon.empty()) {
                verdict = eval_finite(f, w, a, parse_value(horizon)) ? "True" : "False";
            } else {
                verdict = verdict_name(omega_truth(f, w, a));
            }
            if (c.as_json()) {
                std::cout << json{{"formula", print(f)}, {"word", format_word(w)}, {"verdict", verdict}}.dump(2) << '\n';
            } else {
                std::cout << verdict << '\n';
            }
            return 0;
        }
        if (norm->parsed()) {
            auto f = c.formula(formula);
            auto n = normalize(f, var(z), LetterTrick{c.neutral, trick_monoid(f)});
            if (c.as_json()) {
                std::cout << json{{"formula", print(n.formula)}, {"divisor", show(n.divisor)}}.dump(2) << '\n';
            } else {
                std::cout << print(n.formula) << "\ndivisor " << show(n.divisor) << '\n';
            }
            return 0;
        }
        if (bnd->parsed()) {
            auto q = c.formula(formula);
            if (q->kind() != Kind::Quant) throw Error(Errc::InvalidArgument, "boundary needs a quantifier");
            std::vector<FormulaPtr> bodies;
            for (auto& b : q->bodies()) bodies.push_back(f_and(q->guard(), b));
            const VarId pivot = q->bound_var();
            auto nb = normalize_bodies(bodies, pivot, LetterTrick{c.neutral, q->monoid()});
            std::vector<VarId> free = q->free_vars();
            ParamOptions po;
            po.family = family_of(family);
            auto ctx = collapse_params(nb.bodies, pivot, free, q->monoid()->size(), 2, po);
            auto w = parse_word(word, c.neutral);
            auto a = parse_assignment(assign);
            auto B = boundary_points(w, a, ctx);
            if (c.as_json()) {
                json per = json::array();
                for (std::size_t k = 0; k < ctx.T.size(); ++k) {
                    json pts = json::array();
                    for (Value v : B.per_offset()[k]) pts.push_back(show(v));
                    per.push_back({{"offset", print_term(ctx.T[k])}, {"points", pts}});
                }
                json pts = json::array();
                for (Value v : B.points()) pts.push_back(show(v));
                std::cout << json{{"s", ctx.s},           {"delta", show(ctx.delta)}, {"q", show(ctx.q)},
                                  {"p", show(ctx.p)},     {"threshold", show(ctx.rphi)},
                                  {"points", pts},        {"per_offset", per}}
                                 .dump(2)
                          << '\n';
            } else {
                std::cout << "s " << ctx.s << "  delta " << show(ctx.delta) << "  q " << show(ctx.q) << "  p "
                          << show(ctx.p) << "  threshold " << show(ctx.rphi) << "  |F| " << ctx.family_size() << '\n';
                for (std::size_t k = 0; k < ctx.T.size(); ++k) {
                    std::cout << "B_t  t=" << print_term(ctx.T[k]) << ":";
                    for (Value v : B.per_offset()[k]) std::cout << ' ' << show(v);
                    std::cout << '\n';
                }
                std::cout << "point      IL         IR\n";
                for (Value b : B.points()) {
                    auto ir = B.ir(b);
                    std::cout << std::left << std::setw(10) << show(b) << ' ' << std::setw(10) << show(B.il(b)) << ' '
                              << (ir ? show(*ir) : "inf") << '\n';
                }
            }
            return 0;
        }
        if (tree->parsed()) {
            TreeParams p{s, delta, r, relaxed};
            auto root = build_tree(t, parse_values(nnp_text), p);
            if (c.as_json()) {
                json leaves_j = json::array();
                for (Value v : leaves(*root)) leaves_j.push_back(show(v));
                std::cout << json{{"depth", tree_depth(*root)}, {"leaves", leaves_j}, {"render", render_tree(*root)}}.dump(2)
                          << '\n';
            } else {
                std::cout << render_tree(*root);
            }
            return 0;
        }
        if (col->parsed()) {
            CollapseOptions o;
            o.neutral = c.neutral;
            o.trace = trace;
            o.params.family = family_of(family);
            auto res = collapse(c.formula(formula), o);
            if (c.as_json()) {
                json tr = json::array();
                for (auto& [name, f] : res.trace) tr.push_back({{"name", name}, {"formula", print(f)}});
                std::cout << json{{"formula", print(res.formula)}, {"threshold", show(res.threshold)},
                                  {"dag_size", dag_size(res.formula)}, {"trace", tr}}
                                 .dump(2)
                          << '\n';
            } else {
                for (auto& [name, f] : res.trace) std::cout << name << " := " << print(f) << '\n';
                std::cout << "threshold " << show(res.threshold) << '\n' << print(res.formula) << '\n';
            }
            return 0;
        }
        if (ram->parsed() || pipe->parsed()) {
            PipelineResult res;
            if (ram->parsed()) {
                res.r = r;
                res.collapsed.formula = c.formula(formula);
                res.reduced = ramsey_reduce(res.collapsed.formula, DomainDr{r, max_exp}.elements());
            } else {
                PipelineOptions o;
                o.collapse.neutral = c.neutral;
                o.collapse.trace = trace;
                o.max_exp = max_exp;
                o.r = r;
                res = pipeline(c.formula(formula), o);
            }
            json y = json::array();
            std::string ytext;
            for (Value v : res.reduced.Y) {
                y.push_back(show(v));
                ytext += (ytext.empty() ? "" : ",") + show(v);
            }
            if (c.as_json()) {
                std::cout << json{{"formula", print(res.reduced.formula)}, {"r", show(res.r)}, {"Y", y},
                                  {"atoms", res.reduced.atoms}, {"order_only", is_order_only(res.reduced.formula)}}
                                 .dump(2)
                          << '\n';
            } else {
                for (auto& [name, f] : res.collapsed.trace) std::cout << name << " := " << print(f) << '\n';
                std::cout << "r " << show(res.r) << "\nY {" << ytext << "}\n" << print(res.reduced.formula) << '\n';
            }
            return 0;
        }
        if (eq->parsed()) {
            SamplerConfig sc;
            sc.seed = c.seed;
            sc.radices = parse_values(radices);
            sc.max_exp = max_exp;
            sc.samples_per_r = static_cast<std::size_t>(samples);
            sc.neutral = c.neutral;
            sc.letters = letters;
            auto rep = equivalence_check(c.formula(formula), c.formula(formula2), sc);
            return print_report(c, "equiv", rep);
        }
        if (suite->parsed()) {
            SuiteConfig sc;
            sc.seed = c.seed;
            sc.instances = instances;
            sc.max_exp = max_exp;
            sc.neutral = c.neutral;
            sc.family = family_of(family);
            return print_report(c, suite_name, lemma_suite(suite_name, sc));
        }
        if (inv->parsed()) {
            InvarianceConfig ic;
            ic.seed = c.seed;
            ic.trials = static_cast<std::size_t>(trials);
            ic.neutral = c.neutral;
            ic.letters = letters;
            return print_report(c, "invariance", neutral_invariance_check(c.formula(formula), ic));
        }
    } catch (const Error& e) {
        std::cerr << errc_name(e.code()) << ": " << e.what() << '\n';
        return 2;
    }
    return 0;
}

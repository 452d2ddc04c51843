#include <algorithm>
#include <map>
#include <optional>
#include <unordered_map>

#include "adc/collapse.hpp"

namespace adc {

namespace {

bool is_var_comparison(const Formula& a) {
    if (a.kind() != Kind::Less && a.kind() != Kind::Greater && a.kind() != Kind::Eq) return false;
    return a.lhs().is_bare_variable() && a.rhs().is_bare_variable();
}

// Dense ranks of a tuple: its weak order type.
std::vector<int> order_type(const std::vector<Value>& xs) {
    std::vector<Value> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> out;
    for (Value x : xs) {
        out.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin()));
    }
    return out;
}

bool atom_holds(const Formula& a, const std::vector<VarId>& vars, const std::vector<Value>& vals) {
    auto ev = [&](const LinearTerm& t) {
        Value v = t.constant_part();
        for (auto& [x, c] : t.terms()) {
            auto i = static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), x) - vars.begin());
            v = checked_add(v, checked_mul(c, vals[i]));
        }
        return v;
    };
    Value l = ev(a.lhs()), r = ev(a.rhs());
    switch (a.kind()) {
        case Kind::Less:
            return l < r;
        case Kind::Greater:
            return l > r;
        case Kind::Eq:
            return l == r;
        case Kind::Cong:
            return mod_floor(r - l, a.modulus()) == 0;
        default:
            throw Error(Errc::InvalidArgument, "not a numeric atom");
    }
}

// Truth value per realized order type, or nullopt when two tuples of one type disagree.
std::optional<std::map<std::vector<int>, bool>> type_table(const Formula& a, const std::vector<Value>& Y) {
    const auto& vars = a.free_vars();
    const std::size_t k = vars.size();
    std::map<std::vector<int>, bool> table;
    std::vector<Value> vals(k);
    std::vector<std::size_t> idx(k, 0);
    if (Y.empty() && k > 0) return table;
    for (;;) {
        for (std::size_t i = 0; i < k; ++i) vals[i] = Y[idx[i]];
        bool v = atom_holds(a, vars, vals);
        auto [it, fresh] = table.emplace(order_type(vals), v);
        if (!fresh && it->second != v) return std::nullopt;
        std::size_t i = 0;
        while (i < k && ++idx[i] == Y.size()) idx[i++] = 0;
        if (i == k) break;
    }
    return table;
}

using TypeRows = std::vector<std::pair<std::vector<int>, bool>>;

FormulaPtr decision(const TypeRows& rows, const std::vector<VarId>& vars) {
    if (rows.empty()) return f_false();
    bool all_same = std::all_of(rows.begin(), rows.end(), [&](auto& r) { return r.second == rows[0].second; });
    if (all_same) return f_bool(rows[0].second);
    const std::size_t k = vars.size();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            TypeRows lt, eq, gt;
            for (auto& r : rows) {
                int a = r.first[i], b = r.first[j];
                (a < b ? lt : a == b ? eq : gt).push_back(r);
            }
            int nonempty = !lt.empty() + !eq.empty() + !gt.empty();
            if (nonempty < 2) continue;
            auto xi = LinearTerm::variable(vars[i]);
            auto xj = LinearTerm::variable(vars[j]);
            std::vector<FormulaPtr> dis;
            if (!lt.empty()) dis.push_back(f_and(f_less(xi, xj), decision(lt, vars)));
            if (!eq.empty()) dis.push_back(f_and(f_eq(xi, xj), decision(eq, vars)));
            if (!gt.empty()) dis.push_back(f_and(f_greater(xi, xj), decision(gt, vars)));
            return f_or(std::move(dis));
        }
    }
    throw Error(Errc::InvalidArgument, "order types do not separate the rows");
}

std::vector<Value> shrink(const FormulaPtr& atom, const std::vector<Value>& Y, const RamseyOptions& opts) {
    const Formula& a = *atom;
    auto ok = [&](const std::vector<Value>& c) { return c.size() >= opts.min_size && type_table(a, c).has_value(); };
    if (type_table(a, Y)) return Y;
    std::vector<std::vector<Value>> starts{Y};
    if (a.kind() == Kind::Cong) {
        std::map<Value, std::vector<Value>> classes;
        for (Value y : Y) classes[mod_floor(y, a.modulus())].push_back(y);
        std::vector<Value> best;
        for (auto& [res, c] : classes) {
            if (c.size() > best.size()) best = c;
        }
        if (ok(best)) return best;
        starts.push_back(best);
    }
    for (auto& s : starts) {
        std::vector<Value> c = s;
        while (c.size() > opts.min_size) {
            c.erase(c.begin());
            if (ok(c)) return c;
        }
    }
    if (Y.size() <= 12) {
        const std::size_t n = Y.size();
        for (std::size_t size = n - 1; size >= opts.min_size && size > 0; --size) {
            std::vector<bool> pick(n, false);
            std::fill(pick.end() - static_cast<std::ptrdiff_t>(size), pick.end(), true);
            do {
                std::vector<Value> c;
                for (std::size_t i = 0; i < n; ++i) {
                    if (pick[i]) c.push_back(Y[i]);
                }
                if (ok(c)) return c;
            } while (std::next_permutation(pick.begin(), pick.end()));
        }
    }
    throw Error(Errc::RamseyExhausted, "no homogeneous subset of size " + std::to_string(opts.min_size) + " for " +
                                           print(atom));
}

// Largest subset of a small X on which every atom is homogeneous.
std::optional<std::vector<Value>> joint_search(const std::vector<FormulaPtr>& atoms, const std::vector<Value>& X,
                                               const RamseyOptions& opts) {
    const std::size_t n = X.size();
    if (n > opts.max_joint) return std::nullopt;
    std::vector<std::size_t> order(atoms.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t size = n; size >= opts.min_size && size > 0; --size) {
        std::vector<bool> pick(n, false);
        std::fill(pick.end() - static_cast<std::ptrdiff_t>(size), pick.end(), true);
        do {
            std::vector<Value> c;
            for (std::size_t i = 0; i < n; ++i) {
                if (pick[i]) c.push_back(X[i]);
            }
            bool all = true;
            for (std::size_t j = 0; j < order.size(); ++j) {
                if (!type_table(*atoms[order[j]], c)) {
                    std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(j),
                                order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
                    all = false;
                    break;
                }
            }
            if (all) return c;
        } while (std::next_permutation(pick.begin(), pick.end()));
    }
    return std::nullopt;
}

}  // namespace

bool atom_homogeneous(const FormulaPtr& atom, const std::vector<Value>& Y) {
    if (!atom->is_numeric_atom()) throw Error(Errc::InvalidArgument, "not a numeric atom");
    return type_table(*atom, Y).has_value();
}

bool is_order_only(const FormulaPtr& f) {
    bool ok = true;
    for_each_node(f, [&](const FormulaPtr& x) {
        if (x->kind() == Kind::Letter && !x->lhs().is_bare_variable()) ok = false;
        if (x->is_numeric_atom() && !is_var_comparison(*x)) ok = false;
    });
    return ok;
}

RamseyResult ramsey_reduce(const FormulaPtr& phi, const std::vector<Value>& X, const RamseyOptions& opts) {
    std::vector<Value> Y = X;
    std::sort(Y.begin(), Y.end());
    Y.erase(std::unique(Y.begin(), Y.end()), Y.end());
    if (Y.size() < opts.min_size) throw Error(Errc::RamseyExhausted, "X is smaller than the requested size");

    // Atoms in first-occurrence order, deduplicated by printed form.
    std::vector<FormulaPtr> atoms;
    std::unordered_map<std::string, std::size_t> seen;
    std::unordered_map<const Formula*, std::size_t> slot;
    for_each_node(phi, [&](const FormulaPtr& x) {
        if (!x->is_numeric_atom() || is_var_comparison(*x)) return;
        auto key = print(x);
        auto [it, fresh] = seen.emplace(key, atoms.size());
        if (fresh) atoms.push_back(x);
        slot[x.get()] = it->second;
    });
    for (auto& a : atoms) {
        if (a->free_vars().size() > opts.max_arity) {
            throw Error(Errc::RamseyExhausted, "atom with too many variables: " + print(a));
        }
    }
    const std::vector<Value> X_sorted = Y;
    try {
        for (auto& a : atoms) Y = shrink(a, Y, opts);
    } catch (const Error& e) {
        if (e.code() != Errc::RamseyExhausted) throw;
        auto joint = joint_search(atoms, X_sorted, opts);
        if (!joint) throw;
        Y = std::move(*joint);
    }
    std::vector<FormulaPtr> replacement;
    for (auto& a : atoms) {
        auto table = type_table(*a, Y);
        TypeRows rows(table->begin(), table->end());
        replacement.push_back(decision(rows, a->free_vars()));
    }
    RamseyResult out;
    out.formula = map_atoms(phi, [&](const FormulaPtr& a) -> FormulaPtr {
        auto it = slot.find(a.get());
        return it == slot.end() ? a : replacement[it->second];
    });
    out.Y = std::move(Y);
    out.atoms = atoms.size();
    return out;
}

PipelineResult pipeline(const FormulaPtr& phi, const PipelineOptions& opts) {
    PipelineResult out;
    out.collapsed = collapse(phi, opts.collapse);
    out.r = opts.r > 0 ? opts.r : out.collapsed.threshold;
    DomainDr d{out.r, opts.max_exp};
    out.reduced = ramsey_reduce(out.collapsed.formula, d.elements(), opts.ramsey);
    return out;
}

}  // namespace adc

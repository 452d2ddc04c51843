#include "adc/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <mutex>
#include <unordered_set>

namespace adc {

namespace {

struct VarTable {
    std::mutex mu;
    std::deque<std::string> names;
    std::unordered_map<std::string, VarId> index;
    std::uint64_t fresh_counter = 0;
};

VarTable& vars() {
    static VarTable t;
    return t;
}

}  // namespace

VarId var(std::string_view name) {
    auto& t = vars();
    std::lock_guard<std::mutex> lock(t.mu);
    std::string key(name);
    if (auto it = t.index.find(key); it != t.index.end()) return it->second;
    auto id = static_cast<VarId>(t.names.size());
    t.names.push_back(key);
    t.index.emplace(std::move(key), id);
    return id;
}

const std::string& var_name(VarId v) {
    auto& t = vars();
    std::lock_guard<std::mutex> lock(t.mu);
    return t.names.at(v);
}

VarId fresh_var(std::string_view base) {
    auto& t = vars();
    std::lock_guard<std::mutex> lock(t.mu);
    for (;;) {
        std::string name = std::string(base) + std::to_string(t.fresh_counter++);
        if (t.index.count(name)) continue;
        auto id = static_cast<VarId>(t.names.size());
        t.names.push_back(name);
        t.index.emplace(std::move(name), id);
        return id;
    }
}

std::size_t var_count() {
    auto& t = vars();
    std::lock_guard<std::mutex> lock(t.mu);
    return t.names.size();
}

// ---------------------------------------------------------------------------
// LinearTerm

LinearTerm LinearTerm::constant(Value c) {
    LinearTerm t;
    t.constant_ = c;
    return t;
}

LinearTerm LinearTerm::variable(VarId v, Value coeff) {
    LinearTerm t;
    t.add_term(v, coeff);
    return t;
}

Value LinearTerm::coeff(VarId v) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), v,
                               [](const std::pair<VarId, Value>& p, VarId x) { return p.first < x; });
    return (it != terms_.end() && it->first == v) ? it->second : 0;
}

void LinearTerm::add_term(VarId v, Value c) {
    if (c == 0) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), v,
                               [](const std::pair<VarId, Value>& p, VarId x) { return p.first < x; });
    if (it != terms_.end() && it->first == v) {
        it->second = checked_add(it->second, c);
        if (it->second == 0) terms_.erase(it);
    } else {
        terms_.insert(it, {v, c});
    }
}

LinearTerm LinearTerm::operator+(const LinearTerm& o) const {
    LinearTerm r = *this;
    for (auto& [v, c] : o.terms_) r.add_term(v, c);
    r.constant_ = checked_add(r.constant_, o.constant_);
    return r;
}

LinearTerm LinearTerm::operator-(const LinearTerm& o) const { return *this + o.scaled(-1); }

LinearTerm LinearTerm::operator+(Value c) const {
    LinearTerm r = *this;
    r.constant_ = checked_add(r.constant_, c);
    return r;
}

LinearTerm LinearTerm::scaled(Value k) const {
    LinearTerm r;
    if (k == 0) return r;
    r.constant_ = checked_mul(constant_, k);
    for (auto& [v, c] : terms_) r.terms_.push_back({v, checked_mul(c, k)});
    return r;
}

LinearTerm LinearTerm::without(VarId v) const {
    LinearTerm r = *this;
    r.terms_.erase(std::remove_if(r.terms_.begin(), r.terms_.end(),
                                  [v](const std::pair<VarId, Value>& p) { return p.first == v; }),
                   r.terms_.end());
    return r;
}

LinearTerm LinearTerm::substitute(VarId v, const LinearTerm& t) const {
    Value c = coeff(v);
    if (c == 0) return *this;
    return without(v) + t.scaled(c);
}

bool LinearTerm::operator<(const LinearTerm& o) const {
    if (constant_ != o.constant_) return constant_ < o.constant_;
    return terms_ < o.terms_;
}

// ---------------------------------------------------------------------------
// Formula nodes

namespace {

std::vector<VarId> merge_vars(const std::vector<VarId>& a, const std::vector<VarId>& b) {
    std::vector<VarId> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<VarId> term_vars(const LinearTerm& t) {
    std::vector<VarId> out;
    for (auto& [v, c] : t.terms()) out.push_back(v);
    return out;
}

}  // namespace

bool Formula::mentions_free(VarId v) const { return std::binary_search(free_.begin(), free_.end(), v); }

void Formula::finish() {
    switch (kind_) {
        case Kind::True:
        case Kind::False:
            break;
        case Kind::Letter:
            free_ = term_vars(lhs_);
            break;
        case Kind::Less:
        case Kind::Greater:
        case Kind::Eq:
        case Kind::Cong:
            free_ = merge_vars(term_vars(lhs_), term_vars(rhs_));
            break;
        case Kind::Not:
        case Kind::And:
        case Kind::Or:
            for (auto& k : kids_) {
                free_ = merge_vars(free_, k->free_vars());
                has_quant_ = has_quant_ || k->has_quant();
            }
            break;
        case Kind::Quant: {
            free_ = guard_->free_vars();
            for (auto& k : kids_) free_ = merge_vars(free_, k->free_vars());
            free_.erase(std::remove(free_.begin(), free_.end(), var_), free_.end());
            has_quant_ = true;
            break;
        }
    }
}

FormulaPtr Formula::raw_const(bool value) {
    auto f = std::shared_ptr<Formula>(new Formula());
    f->kind_ = value ? Kind::True : Kind::False;
    return f;
}

FormulaPtr Formula::raw_letter(char c, LinearTerm pos) {
    auto f = std::shared_ptr<Formula>(new Formula());
    f->kind_ = Kind::Letter;
    f->letter_ = c;
    f->lhs_ = std::move(pos);
    f->finish();
    return f;
}

FormulaPtr Formula::raw_compare(Kind k, LinearTerm a, LinearTerm b) {
    auto f = std::shared_ptr<Formula>(new Formula());
    f->kind_ = k;
    f->lhs_ = std::move(a);
    f->rhs_ = std::move(b);
    f->finish();
    return f;
}

FormulaPtr Formula::raw_cong(Value q, LinearTerm a, LinearTerm b) {
    if (q <= 0) throw Error(Errc::InvalidArgument, "congruence modulus must be positive");
    auto f = std::shared_ptr<Formula>(new Formula());
    f->kind_ = Kind::Cong;
    f->modulus_ = q;
    f->lhs_ = std::move(a);
    f->rhs_ = std::move(b);
    f->finish();
    return f;
}

FormulaPtr Formula::raw_not(FormulaPtr a) {
    auto f = std::shared_ptr<Formula>(new Formula());
    f->kind_ = Kind::Not;
    f->kids_.push_back(std::move(a));
    f->finish();
    return f;
}

FormulaPtr Formula::raw_nary(Kind k, std::vector<FormulaPtr> kids) {
    auto f = std::shared_ptr<Formula>(new Formula());
    f->kind_ = k;
    f->kids_ = std::move(kids);
    f->finish();
    return f;
}

FormulaPtr Formula::raw_quant(MonoidPtr m, Element target, VarId v, FormulaPtr guard, std::vector<FormulaPtr> bodies) {
    if (static_cast<int>(bodies.size()) != m->arity()) {
        throw Error(Errc::ArityMismatch, "Q{" + m->name() + "} expects " + std::to_string(m->arity()) + " bodies, got " +
                                             std::to_string(bodies.size()));
    }
    auto f = std::shared_ptr<Formula>(new Formula());
    f->kind_ = Kind::Quant;
    f->monoid_ = std::move(m);
    f->target_ = target;
    f->var_ = v;
    f->guard_ = guard ? std::move(guard) : raw_const(true);
    f->kids_ = std::move(bodies);
    f->finish();
    return f;
}

// ---------------------------------------------------------------------------
// Builders

FormulaPtr f_true() {
    static const FormulaPtr t = Formula::raw_const(true);
    return t;
}

FormulaPtr f_false() {
    static const FormulaPtr f = Formula::raw_const(false);
    return f;
}

FormulaPtr f_bool(bool b) { return b ? f_true() : f_false(); }

FormulaPtr f_letter(char c, const LinearTerm& pos) {
    if (pos.is_constant() && pos.constant_part() < 0) return f_false();
    return Formula::raw_letter(c, pos);
}

namespace {

// Drops variables occurring on both sides from the right-hand side.
void cancel_shared(LinearTerm& a, LinearTerm& b) {
    LinearTerm shared;
    for (auto& [v, c] : b.terms()) {
        if (a.mentions(v)) shared = shared + LinearTerm::variable(v, c);
    }
    if (shared.is_constant()) return;
    a = a - shared;
    b = b - shared;
}

}  // namespace

FormulaPtr f_less(LinearTerm a, LinearTerm b) {
    cancel_shared(a, b);
    LinearTerm d = a - b;
    if (d.is_constant()) return f_bool(d.constant_part() < 0);
    return Formula::raw_compare(Kind::Less, std::move(a), std::move(b));
}

FormulaPtr f_greater(LinearTerm a, LinearTerm b) {
    cancel_shared(a, b);
    LinearTerm d = a - b;
    if (d.is_constant()) return f_bool(d.constant_part() > 0);
    return Formula::raw_compare(Kind::Greater, std::move(a), std::move(b));
}

FormulaPtr f_eq(LinearTerm a, LinearTerm b) {
    cancel_shared(a, b);
    LinearTerm d = a - b;
    if (d.is_constant()) return f_bool(d.constant_part() == 0);
    return Formula::raw_compare(Kind::Eq, std::move(a), std::move(b));
}

FormulaPtr f_cong(Value q, LinearTerm a, LinearTerm b) {
    cancel_shared(a, b);
    q = abs_value(q);
    if (q == 1) return f_true();
    LinearTerm d = b - a;
    if (d.is_constant()) return f_bool(mod_floor(d.constant_part(), q) == 0);
    return Formula::raw_cong(q, std::move(a), std::move(b));
}

FormulaPtr f_not(const FormulaPtr& a) {
    if (a->kind() == Kind::True) return f_false();
    if (a->kind() == Kind::False) return f_true();
    if (a->kind() == Kind::Not) return a->children()[0];
    return Formula::raw_not(a);
}

namespace {

FormulaPtr nary(Kind k, std::vector<FormulaPtr> kids) {
    const Kind unit = k == Kind::And ? Kind::True : Kind::False;
    const Kind zero = k == Kind::And ? Kind::False : Kind::True;
    std::vector<FormulaPtr> flat;
    std::unordered_set<const Formula*> seen;
    auto push = [&](const FormulaPtr& x) {
        if (seen.insert(x.get()).second) flat.push_back(x);
    };
    for (auto& x : kids) {
        if (x->kind() == unit) continue;
        if (x->kind() == zero) return x;
        if (x->kind() == k) {
            for (auto& y : x->children()) push(y);
        } else {
            push(x);
        }
    }
    if (flat.empty()) return unit == Kind::True ? f_true() : f_false();
    if (flat.size() == 1) return flat[0];
    return Formula::raw_nary(k, std::move(flat));
}

}  // namespace

FormulaPtr f_and(std::vector<FormulaPtr> kids) { return nary(Kind::And, std::move(kids)); }
FormulaPtr f_or(std::vector<FormulaPtr> kids) { return nary(Kind::Or, std::move(kids)); }
FormulaPtr f_and(const FormulaPtr& a, const FormulaPtr& b) { return nary(Kind::And, {a, b}); }
FormulaPtr f_or(const FormulaPtr& a, const FormulaPtr& b) { return nary(Kind::Or, {a, b}); }

FormulaPtr f_quant(const MonoidPtr& m, Element target, VarId v, FormulaPtr guard, std::vector<FormulaPtr> bodies) {
    if (!guard) guard = f_true();
    bool all_false = guard->kind() == Kind::False ||
                     std::all_of(bodies.begin(), bodies.end(), [](const FormulaPtr& b) { return b->kind() == Kind::False; });
    if (all_false && static_cast<int>(bodies.size()) == m->arity()) return f_bool(target == m->identity());
    return Formula::raw_quant(m, target, v, std::move(guard), std::move(bodies));
}

FormulaPtr f_exists(VarId v, FormulaPtr guard, FormulaPtr body) {
    auto u1 = builtin_monoid("U1");
    return f_quant(u1, u1->element("0"), v, std::move(guard), {std::move(body)});
}

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
        case Kind::True:
        case Kind::False:
            return true;
        case Kind::Letter:
            return a->letter() == b->letter() && a->lhs() == b->lhs();
        case Kind::Less:
        case Kind::Greater:
        case Kind::Eq:
            return a->lhs() == b->lhs() && a->rhs() == b->rhs();
        case Kind::Cong:
            return a->modulus() == b->modulus() && a->lhs() == b->lhs() && a->rhs() == b->rhs();
        case Kind::Quant:
            if (a->monoid()->name() != b->monoid()->name() || a->target() != b->target() ||
                a->bound_var() != b->bound_var() || !structurally_equal(a->guard(), b->guard())) {
                return false;
            }
            [[fallthrough]];
        case Kind::Not:
        case Kind::And:
        case Kind::Or:
            if (a->children().size() != b->children().size()) return false;
            for (std::size_t i = 0; i < a->children().size(); ++i) {
                if (!structurally_equal(a->children()[i], b->children()[i])) return false;
            }
            return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Printing

std::string print_term(const LinearTerm& t) {
    std::vector<std::pair<std::string, Value>> items;
    for (auto& [v, c] : t.terms()) items.push_back({var_name(v), c});
    std::sort(items.begin(), items.end());
    std::string out;
    bool first = true;
    auto emit = [&](Value c, const std::string& name) {
        Value mag = abs_value(c);
        std::string body = name.empty() ? to_string(mag) : (mag == 1 ? name : to_string(mag) + "*" + name);
        if (first) {
            out += c < 0 ? "-" + body : body;
        } else {
            out += c < 0 ? " - " + body : " + " + body;
        }
        first = false;
    };
    for (auto& [name, c] : items) emit(c, name);
    if (t.constant_part() != 0 || first) emit(t.constant_part(), "");
    return out;
}

namespace {

void print_into(const FormulaPtr& f, std::string& out) {
    switch (f->kind()) {
        case Kind::True:
            out += "true";
            return;
        case Kind::False:
            out += "false";
            return;
        case Kind::Letter:
            out += "'";
            out += f->letter();
            out += "'(" + print_term(f->lhs()) + ")";
            return;
        case Kind::Less:
            out += print_term(f->lhs()) + " < " + print_term(f->rhs());
            return;
        case Kind::Greater:
            out += print_term(f->lhs()) + " > " + print_term(f->rhs());
            return;
        case Kind::Eq:
            out += print_term(f->lhs()) + " = " + print_term(f->rhs());
            return;
        case Kind::Cong:
            out += print_term(f->lhs()) + " =mod " + to_string(f->modulus()) + " " + print_term(f->rhs());
            return;
        case Kind::Not: {
            const auto& c = f->children()[0];
            out += "!";
            if (c->is_atom() && c->kind() != Kind::Letter) {
                out += "(";
                print_into(c, out);
                out += ")";
            } else {
                print_into(c, out);
            }
            return;
        }
        case Kind::And:
        case Kind::Or: {
            out += "(";
            const char* sep = f->kind() == Kind::And ? " & " : " | ";
            for (std::size_t i = 0; i < f->children().size(); ++i) {
                if (i) out += sep;
                print_into(f->children()[i], out);
            }
            out += ")";
            return;
        }
        case Kind::Quant: {
            out += "Q{" + f->monoid()->name() + "," + f->monoid()->element_name(f->target()) + "} " +
                   var_name(f->bound_var());
            if (f->guard()->kind() != Kind::True) {
                out += " [";
                print_into(f->guard(), out);
                out += "]";
            }
            out += " . < ";
            for (std::size_t i = 0; i < f->bodies().size(); ++i) {
                if (i) out += ", ";
                print_into(f->bodies()[i], out);
            }
            out += " >";
            return;
        }
    }
}

}  // namespace

std::string print(const FormulaPtr& f) {
    std::string out;
    print_into(f, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Parser {
public:
    Parser(std::string_view text, const MonoidRegistry* monoids) : s_(text), monoids_(monoids) {}

    FormulaPtr formula_eof() {
        auto f = parse_or();
        ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return f;
    }

    LinearTerm term_eof() {
        auto t = term();
        ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return t;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(pos_, msg); }

    void ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    std::string peek_ident() {
        ws();
        std::size_t p = pos_;
        if (p >= s_.size() || !ident_start(s_[p])) return {};
        std::size_t q = p;
        while (q < s_.size() && ident_char(s_[q])) ++q;
        return std::string(s_.substr(p, q - p));
    }

    std::string ident() {
        auto id = peek_ident();
        if (id.empty()) fail("expected identifier");
        pos_ += id.size();
        return id;
    }

    VarId variable() {
        auto id = ident();
        if (id == "E" || id == "Q" || id == "true" || id == "false") fail("reserved word '" + id + "' used as variable");
        return var(id);
    }

    Value integer() {
        ws();
        std::size_t p = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (p == pos_) fail("expected integer");
        return parse_value(s_.substr(p, pos_ - p));
    }

    LinearTerm summand() {
        ws();
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            Value c = integer();
            if (accept('*')) return LinearTerm::variable(variable(), c);
            return LinearTerm::constant(c);
        }
        return LinearTerm::variable(variable());
    }

    LinearTerm term() {
        bool neg = accept('-');
        LinearTerm t = summand();
        if (neg) t = -t;
        for (;;) {
            if (accept('+')) {
                t = t + summand();
            } else if (accept('-')) {
                t = t - summand();
            } else {
                return t;
            }
        }
    }

    FormulaPtr parse_or() {
        std::vector<FormulaPtr> items{parse_and()};
        while (accept('|')) items.push_back(parse_and());
        return items.size() == 1 ? items[0] : Formula::raw_nary(Kind::Or, std::move(items));
    }

    FormulaPtr parse_and() {
        std::vector<FormulaPtr> items{parse_unary()};
        while (accept('&')) items.push_back(parse_unary());
        return items.size() == 1 ? items[0] : Formula::raw_nary(Kind::And, std::move(items));
    }

    FormulaPtr parse_unary() {
        if (accept('!')) return Formula::raw_not(parse_unary());
        if (accept('(')) {
            auto f = parse_or();
            expect(')');
            return f;
        }
        if (peek('\'')) return letter_atom();
        auto id = peek_ident();
        if (id == "true" || id == "false") {
            pos_ += id.size();
            return Formula::raw_const(id == "true");
        }
        if (id == "Q") {
            std::size_t save = pos_;
            pos_ += 1;
            if (peek('{')) return quantifier();
            pos_ = save;
        }
        if (id == "E") {
            pos_ += 1;
            VarId v = variable();
            expect('.');
            auto body = parse_unary_or_block();
            auto u1 = resolve("U1");
            return Formula::raw_quant(u1, u1->element("0"), v, nullptr, {body});
        }
        return comparison();
    }

    // The scope of `E x .` extends as far right as possible.
    FormulaPtr parse_unary_or_block() { return parse_or(); }

    FormulaPtr letter_atom() {
        expect('\'');
        if (pos_ >= s_.size()) fail("unterminated letter");
        char c = s_[pos_++];
        if (pos_ >= s_.size() || s_[pos_] != '\'') fail("expected closing quote");
        ++pos_;
        expect('(');
        auto t = term();
        expect(')');
        return Formula::raw_letter(c, std::move(t));
    }

    FormulaPtr comparison() {
        auto a = term();
        ws();
        if (accept('<')) return Formula::raw_compare(Kind::Less, a, term());
        if (accept('>')) return Formula::raw_compare(Kind::Greater, a, term());
        if (accept('=')) {
            if (s_.substr(pos_, 3) == "mod") {
                pos_ += 3;
                Value q = integer();
                if (q <= 0) fail("modulus must be positive");
                return Formula::raw_cong(q, a, term());
            }
            return Formula::raw_compare(Kind::Eq, a, term());
        }
        fail("expected comparison operator");
    }

    MonoidPtr resolve(std::string_view name) {
        try {
            if (monoids_) return monoids_->resolve(name);
            return builtin_monoid(name);
        } catch (const Error& e) {
            if (e.code() == Errc::UnknownMonoid) throw;
            throw Error(Errc::UnknownMonoid, e.what());
        }
    }

    std::string until(char stop1, char stop2) {
        ws();
        std::size_t p = pos_;
        while (pos_ < s_.size() && s_[pos_] != stop1 && s_[pos_] != stop2) ++pos_;
        std::string out(s_.substr(p, pos_ - p));
        while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
        return out;
    }

    FormulaPtr quantifier() {
        expect('{');
        std::string name = until(',', '}');
        expect(',');
        std::string elem = until(',', '}');
        expect('}');
        auto m = resolve(name);
        Element target = m->element(elem);
        VarId v = variable();
        FormulaPtr guard;
        if (accept('[')) {
            guard = parse_or();
            expect(']');
        }
        expect('.');
        expect('<');
        std::vector<FormulaPtr> bodies{parse_or()};
        while (accept(',')) bodies.push_back(parse_or());
        expect('>');
        return Formula::raw_quant(m, target, v, guard, std::move(bodies));
    }

    std::string_view s_;
    const MonoidRegistry* monoids_;
    std::size_t pos_ = 0;
};

}  // namespace

FormulaPtr parse(std::string_view text, const MonoidRegistry& monoids) { return Parser(text, &monoids).formula_eof(); }
FormulaPtr parse(std::string_view text) { return Parser(text, nullptr).formula_eof(); }
LinearTerm parse_term(std::string_view text) { return Parser(text, nullptr).term_eof(); }

// ---------------------------------------------------------------------------
// Traversals

void for_each_node(const FormulaPtr& f, const std::function<void(const FormulaPtr&)>& fn) {
    std::unordered_set<const Formula*> seen;
    std::vector<FormulaPtr> stack{f};
    while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        if (!seen.insert(x.get()).second) continue;
        fn(x);
        for (auto& k : x->children()) stack.push_back(k);
        if (x->kind() == Kind::Quant) stack.push_back(x->guard());
    }
}

std::size_t dag_size(const FormulaPtr& f) {
    std::size_t n = 0;
    for_each_node(f, [&](const FormulaPtr&) { ++n; });
    return n;
}

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    return __builtin_add_overflow(a, b, &r) ? UINT64_MAX : r;
}

std::uint64_t tree_size_rec(const FormulaPtr& f, std::unordered_map<const Formula*, std::uint64_t>& memo) {
    if (auto it = memo.find(f.get()); it != memo.end()) return it->second;
    std::uint64_t n = 1;
    for (auto& k : f->children()) n = sat_add(n, tree_size_rec(k, memo));
    if (f->kind() == Kind::Quant) n = sat_add(n, tree_size_rec(f->guard(), memo));
    memo[f.get()] = n;
    return n;
}

int depth_rec(const FormulaPtr& f, std::unordered_map<const Formula*, int>& memo) {
    if (auto it = memo.find(f.get()); it != memo.end()) return it->second;
    int d = 0;
    for (auto& k : f->children()) d = std::max(d, depth_rec(k, memo));
    if (f->kind() == Kind::Quant) d = 1 + std::max(d, depth_rec(f->guard(), memo));
    memo[f.get()] = d;
    return d;
}

}  // namespace

std::uint64_t tree_size(const FormulaPtr& f) {
    std::unordered_map<const Formula*, std::uint64_t> memo;
    return tree_size_rec(f, memo);
}

int quantifier_depth(const FormulaPtr& f) {
    std::unordered_map<const Formula*, int> memo;
    return depth_rec(f, memo);
}

namespace {

void conjuncts(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
    if (f->kind() == Kind::And) {
        for (auto& k : f->children()) conjuncts(k, out);
    } else {
        out.push_back(f);
    }
}

bool has_neutral_guard(const FormulaPtr& f, VarId x, char neutral) {
    std::vector<FormulaPtr> cs;
    conjuncts(f, cs);
    for (auto& c : cs) {
        if (c->kind() != Kind::Not) continue;
        const auto& a = c->children()[0];
        if (a->kind() == Kind::Letter && a->letter() == neutral && a->lhs() == LinearTerm::variable(x)) return true;
    }
    return false;
}

}  // namespace

bool is_ad_guarded(const Formula& q, char neutral) {
    if (q.kind() != Kind::Quant) return false;
    if (has_neutral_guard(q.guard(), q.bound_var(), neutral)) return true;
    if (q.bodies().empty()) return false;
    return std::all_of(q.bodies().begin(), q.bodies().end(),
                       [&](const FormulaPtr& b) { return has_neutral_guard(b, q.bound_var(), neutral); });
}

bool is_active_domain(const FormulaPtr& f, char neutral) {
    bool ok = true;
    for_each_node(f, [&](const FormulaPtr& x) {
        if (x->kind() == Kind::Quant && !is_ad_guarded(*x, neutral)) ok = false;
    });
    return ok;
}

namespace {

// Rebuilds a formula bottom-up; `leaf` may replace atoms, `quant` may replace quantifiers
// after their parts were rebuilt. Shared subterms are rebuilt once.
class Rebuilder {
public:
    std::function<FormulaPtr(const FormulaPtr&)> leaf;
    std::function<FormulaPtr(const FormulaPtr& orig, FormulaPtr guard, std::vector<FormulaPtr> bodies)> quant;

    FormulaPtr run(const FormulaPtr& f) {
        if (auto it = memo_.find(f.get()); it != memo_.end()) return it->second;
        FormulaPtr out;
        switch (f->kind()) {
            case Kind::True:
            case Kind::False:
                out = f;
                break;
            case Kind::Letter:
            case Kind::Less:
            case Kind::Greater:
            case Kind::Eq:
            case Kind::Cong:
                out = leaf ? leaf(f) : f;
                break;
            case Kind::Not:
                out = f_not(run(f->children()[0]));
                break;
            case Kind::And:
            case Kind::Or: {
                std::vector<FormulaPtr> kids;
                bool same = true;
                for (auto& k : f->children()) {
                    kids.push_back(run(k));
                    same = same && kids.back().get() == k.get();
                }
                out = same ? f : (f->kind() == Kind::And ? f_and(std::move(kids)) : f_or(std::move(kids)));
                break;
            }
            case Kind::Quant: {
                auto g = run(f->guard());
                std::vector<FormulaPtr> bodies;
                for (auto& b : f->bodies()) bodies.push_back(run(b));
                if (quant) {
                    out = quant(f, std::move(g), std::move(bodies));
                } else {
                    out = f_quant(f->monoid(), f->target(), f->bound_var(), std::move(g), std::move(bodies));
                }
                break;
            }
        }
        memo_[f.get()] = out;
        return out;
    }

private:
    std::unordered_map<const Formula*, FormulaPtr> memo_;
};

}  // namespace

FormulaPtr map_atoms(const FormulaPtr& f, const std::function<FormulaPtr(const FormulaPtr&)>& fn) {
    Rebuilder rb;
    rb.leaf = fn;
    return rb.run(f);
}

FormulaPtr relativize(const FormulaPtr& f, char neutral) {
    Rebuilder rb;
    rb.quant = [neutral](const FormulaPtr& orig, FormulaPtr guard, std::vector<FormulaPtr> bodies) {
        VarId x = orig->bound_var();
        if (!has_neutral_guard(guard, x, neutral)) {
            guard = f_and(f_not(f_letter(neutral, LinearTerm::variable(x))), guard);
        }
        return f_quant(orig->monoid(), orig->target(), x, std::move(guard), std::move(bodies));
    };
    return rb.run(f);
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

class Substituter {
public:
    using Pool = std::map<std::vector<VarId>, std::unique_ptr<Substituter>>;

    explicit Substituter(std::map<VarId, LinearTerm> s, std::shared_ptr<Pool> pool = nullptr)
        : s_(std::move(s)), pool_(pool ? std::move(pool) : std::make_shared<Pool>()) {
        for (auto& [v, t] : s_) {
            keys_.push_back(v);
            for (auto& [w, c] : t.terms()) introduced_.insert(w);
        }
    }

    FormulaPtr run(const FormulaPtr& f) {
        if (!touches(*f)) return f;
        if (auto it = memo_.find(f.get()); it != memo_.end()) return it->second;
        FormulaPtr out;
        switch (f->kind()) {
            case Kind::True:
            case Kind::False:
                out = f;
                break;
            case Kind::Letter:
                out = f_letter(f->letter(), apply(f->lhs()));
                break;
            case Kind::Less:
                out = f_less(apply(f->lhs()), apply(f->rhs()));
                break;
            case Kind::Greater:
                out = f_greater(apply(f->lhs()), apply(f->rhs()));
                break;
            case Kind::Eq:
                out = f_eq(apply(f->lhs()), apply(f->rhs()));
                break;
            case Kind::Cong:
                out = f_cong(f->modulus(), apply(f->lhs()), apply(f->rhs()));
                break;
            case Kind::Not:
                out = f_not(run(f->children()[0]));
                break;
            case Kind::And:
            case Kind::Or: {
                std::vector<FormulaPtr> kids;
                for (auto& k : f->children()) kids.push_back(run(k));
                out = f->kind() == Kind::And ? f_and(std::move(kids)) : f_or(std::move(kids));
                break;
            }
            case Kind::Quant:
                out = quant(f);
                break;
        }
        memo_[f.get()] = out;
        return out;
    }

private:
    bool touches(const Formula& f) const {
        for (VarId v : keys_) {
            if (f.mentions_free(v)) return true;
        }
        return false;
    }

    LinearTerm apply(const LinearTerm& t) const {
        LinearTerm out = t;
        for (auto& [v, r] : s_) {
            Value c = t.coeff(v);
            if (c != 0) out = out.without(v) + r.scaled(c);
        }
        return out;
    }

    // The substituter for s_ without `x`, shared by every binder of x below the root.
    Substituter& without_key(VarId x) {
        if (!s_.count(x)) return *this;
        auto inner_map = s_;
        inner_map.erase(x);
        std::vector<VarId> keys;
        for (auto& [v, t] : inner_map) keys.push_back(v);
        auto& slot = (*pool_)[keys];
        if (!slot) slot = std::make_unique<Substituter>(std::move(inner_map), pool_);
        return *slot;
    }

    FormulaPtr quant(const FormulaPtr& f) {
        VarId x = f->bound_var();
        FormulaPtr guard = f->guard();
        std::vector<FormulaPtr> bodies = f->bodies();
        Substituter& inner = without_key(x);
        if (introduced_.count(x)) {
            VarId y = fresh_var("_r");
            Substituter rename({{x, LinearTerm::variable(y)}});
            guard = rename.run(guard);
            for (auto& b : bodies) b = rename.run(b);
            x = y;
        }
        guard = inner.run(guard);
        for (auto& b : bodies) b = inner.run(b);
        return f_quant(f->monoid(), f->target(), x, std::move(guard), std::move(bodies));
    }

    std::map<VarId, LinearTerm> s_;
    std::vector<VarId> keys_;
    std::unordered_set<VarId> introduced_;
    std::unordered_map<const Formula*, FormulaPtr> memo_;
    std::shared_ptr<Pool> pool_;
};

}  // namespace

FormulaPtr substitute(const FormulaPtr& f, const std::map<VarId, LinearTerm>& s) {
    if (s.empty()) return f;
    return Substituter(s).run(f);
}

FormulaPtr substitute(const FormulaPtr& f, VarId v, const LinearTerm& t) { return substitute(f, {{v, t}}); }

// ---------------------------------------------------------------------------
// Letter trick and normalization

FormulaPtr letter_trick(char c, const LinearTerm& pos, const LetterTrick& trick) {
    if (!trick.monoid) throw Error(Errc::NoMonoidAvailable, "no monoid available to express a letter on a compound term");
    const auto& m = trick.monoid;
    VarId x = fresh_var("_t");
    auto xv = LinearTerm::variable(x);
    auto guard = f_not(f_letter(trick.neutral, xv));
    std::vector<FormulaPtr> bodies(static_cast<std::size_t>(m->arity()), f_false());
    if (c == trick.neutral) {
        bodies[0] = f_eq(xv, pos);
        auto hit = Formula::raw_quant(m, m->ordering()[0], x, guard, std::move(bodies));
        return f_and(f_greater(pos, LinearTerm::constant(-1)), f_not(hit));
    }
    bodies[0] = f_and(f_eq(xv, pos), f_letter(c, xv));
    return Formula::raw_quant(m, m->ordering()[0], x, guard, std::move(bodies));
}

FormulaPtr rewrite_compound_letters(const FormulaPtr& f, const LetterTrick& trick) {
    Rebuilder rb;
    rb.leaf = [&](const FormulaPtr& a) -> FormulaPtr {
        if (a->kind() == Kind::Letter && !a->lhs().is_bare_variable()) return letter_trick(a->letter(), a->lhs(), trick);
        return a;
    };
    return rb.run(f);
}

namespace {

// Applies `fn` to atoms in which z occurs free; quantifiers rebinding z are left alone.
class AtomRewriter {
public:
    AtomRewriter(VarId z, std::function<FormulaPtr(const FormulaPtr&)> fn) : z_(z), fn_(std::move(fn)) {}

    FormulaPtr run(const FormulaPtr& f) {
        if (!f->mentions_free(z_)) return f;
        if (auto it = memo_.find(f.get()); it != memo_.end()) return it->second;
        FormulaPtr out;
        switch (f->kind()) {
            case Kind::True:
            case Kind::False:
                out = f;
                break;
            case Kind::Letter:
            case Kind::Less:
            case Kind::Greater:
            case Kind::Eq:
            case Kind::Cong:
                out = fn_(f);
                break;
            case Kind::Not:
                out = f_not(run(f->children()[0]));
                break;
            case Kind::And:
            case Kind::Or: {
                std::vector<FormulaPtr> kids;
                for (auto& k : f->children()) kids.push_back(run(k));
                out = f->kind() == Kind::And ? f_and(std::move(kids)) : f_or(std::move(kids));
                break;
            }
            case Kind::Quant: {
                auto g = run(f->guard());
                std::vector<FormulaPtr> bodies;
                for (auto& b : f->bodies()) bodies.push_back(run(b));
                out = f_quant(f->monoid(), f->target(), f->bound_var(), std::move(g), std::move(bodies));
                break;
            }
        }
        memo_[f.get()] = out;
        return out;
    }

private:
    VarId z_;
    std::function<FormulaPtr(const FormulaPtr&)> fn_;
    std::unordered_map<const Formula*, FormulaPtr> memo_;
};

void collect_z_coeffs(const FormulaPtr& f, VarId z, Value& n, std::unordered_set<const Formula*>& seen) {
    if (!f->mentions_free(z) || !seen.insert(f.get()).second) return;
    if (f->is_numeric_atom()) {
        Value a = f->lhs().coeff(z) - f->rhs().coeff(z);
        if (a != 0) n = lcm_value(n, a);
        return;
    }
    for (auto& k : f->children()) collect_z_coeffs(k, z, n, seen);
    if (f->kind() == Kind::Quant) collect_z_coeffs(f->guard(), z, n, seen);
}

}  // namespace

bool is_normalized_atom(const Formula& atom, VarId z) {
    if (!atom.is_numeric_atom()) return false;
    return atom.lhs() == LinearTerm::variable(z) && !atom.rhs().mentions(z);
}

NormalizedBodies normalize_bodies(const std::vector<FormulaPtr>& bodies, VarId z, const LetterTrick& trick) {
    NormalizedBodies out;
    out.pivot = z;
    std::vector<FormulaPtr> stage;
    {
        AtomRewriter letters(z, [&](const FormulaPtr& a) -> FormulaPtr {
            if (a->kind() == Kind::Letter) return letter_trick(a->letter(), a->lhs(), trick);
            return a;
        });
        for (auto& b : bodies) stage.push_back(letters.run(b));
    }
    Value n = 1;
    std::unordered_set<const Formula*> seen;
    for (auto& b : stage) collect_z_coeffs(b, z, n, seen);
    out.divisor = n;
    const auto zt = LinearTerm::variable(z);
    AtomRewriter scale(z, [&](const FormulaPtr& f) -> FormulaPtr {
        if (!f->is_numeric_atom()) return f;
        LinearTerm d = f->lhs() - f->rhs();
        Value a = d.coeff(z);
        if (a == 0) return f;
        LinearTerm eps = d.without(z);
        Value k = n / abs_value(a);
        // a z + eps (op) 0  <=>  n z (op') rho, where z now stands for n z.
        LinearTerm rho = a > 0 ? eps.scaled(-k) : eps.scaled(k);
        switch (f->kind()) {
            case Kind::Less:
                return a > 0 ? f_less(zt, rho) : f_greater(zt, rho);
            case Kind::Greater:
                return a > 0 ? f_greater(zt, rho) : f_less(zt, rho);
            case Kind::Eq:
                return f_eq(zt, rho);
            case Kind::Cong:
                return f_cong(checked_mul(f->modulus(), k), zt, rho);
            default:
                return f;
        }
    });
    for (auto& b : stage) {
        auto nb = scale.run(b);
        if (n > 1) nb = f_and(f_cong(n, zt, LinearTerm::constant(0)), nb);
        out.bodies.push_back(nb);
    }
    return out;
}

NormalizedFormula normalize(const FormulaPtr& f, VarId z, const LetterTrick& trick) {
    auto nb = normalize_bodies({f}, z, trick);
    return {nb.bodies[0], nb.pivot, nb.divisor};
}

}  // namespace adc

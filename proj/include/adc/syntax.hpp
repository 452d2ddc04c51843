#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "adc/algebra.hpp"
#include "adc/value.hpp"

namespace adc {

// Variables are interned process-wide.
using VarId = std::uint32_t;

VarId var(std::string_view name);
const std::string& var_name(VarId v);
// A name never interned before, built from `base`.
VarId fresh_var(std::string_view base);
std::size_t var_count();

class LinearTerm {
public:
    LinearTerm() = default;
    static LinearTerm constant(Value c);
    static LinearTerm variable(VarId v, Value coeff = 1);

    Value constant_part() const { return constant_; }
    Value coeff(VarId v) const;
    // Sorted by VarId, no zero coefficients.
    const std::vector<std::pair<VarId, Value>>& terms() const { return terms_; }
    bool is_constant() const { return terms_.empty(); }
    bool is_bare_variable() const { return constant_ == 0 && terms_.size() == 1 && terms_[0].second == 1; }
    bool mentions(VarId v) const { return coeff(v) != 0; }

    LinearTerm operator+(const LinearTerm& o) const;
    LinearTerm operator-(const LinearTerm& o) const;
    LinearTerm operator-() const { return scaled(-1); }
    LinearTerm operator+(Value c) const;
    LinearTerm scaled(Value k) const;
    LinearTerm without(VarId v) const;
    LinearTerm substitute(VarId v, const LinearTerm& t) const;

    bool operator==(const LinearTerm& o) const { return constant_ == o.constant_ && terms_ == o.terms_; }
    bool operator!=(const LinearTerm& o) const { return !(*this == o); }
    bool operator<(const LinearTerm& o) const;

private:
    void add_term(VarId v, Value c);
    std::vector<std::pair<VarId, Value>> terms_;
    Value constant_ = 0;
};

enum class Kind : std::uint8_t { True, False, Letter, Less, Greater, Eq, Cong, Not, And, Or, Quant };

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
public:
    Kind kind() const { return kind_; }
    bool is_atom() const { return kind_ >= Kind::Letter && kind_ <= Kind::Cong; }
    bool is_numeric_atom() const { return kind_ >= Kind::Less && kind_ <= Kind::Cong; }

    char letter() const { return letter_; }
    // Letter atoms keep their position in lhs().
    const LinearTerm& lhs() const { return lhs_; }
    const LinearTerm& rhs() const { return rhs_; }
    Value modulus() const { return modulus_; }

    // Not: one child. And/Or: any number. Quant: the bodies.
    const std::vector<FormulaPtr>& children() const { return kids_; }

    const MonoidPtr& monoid() const { return monoid_; }
    Element target() const { return target_; }
    VarId bound_var() const { return var_; }
    const FormulaPtr& guard() const { return guard_; }
    const std::vector<FormulaPtr>& bodies() const { return kids_; }

    // Sorted.
    const std::vector<VarId>& free_vars() const { return free_; }
    bool has_quant() const { return has_quant_; }
    bool mentions_free(VarId v) const;

    static FormulaPtr raw_const(bool value);
    static FormulaPtr raw_letter(char c, LinearTerm pos);
    static FormulaPtr raw_compare(Kind k, LinearTerm a, LinearTerm b);
    static FormulaPtr raw_cong(Value q, LinearTerm a, LinearTerm b);
    static FormulaPtr raw_not(FormulaPtr a);
    static FormulaPtr raw_nary(Kind k, std::vector<FormulaPtr> kids);
    static FormulaPtr raw_quant(MonoidPtr m, Element target, VarId v, FormulaPtr guard, std::vector<FormulaPtr> bodies);

private:
    Formula() = default;
    void finish();

    Kind kind_ = Kind::True;
    char letter_ = 0;
    LinearTerm lhs_, rhs_;
    Value modulus_ = 0;
    std::vector<FormulaPtr> kids_;
    MonoidPtr monoid_;
    Element target_ = 0;
    VarId var_ = 0;
    FormulaPtr guard_;
    std::vector<VarId> free_;
    bool has_quant_ = false;
};

// Simplifying builders: constant folding, flattening, True/False absorption.
// Comparisons drop variables shared by both sides from the right.
FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_bool(bool b);
FormulaPtr f_letter(char c, const LinearTerm& pos);
FormulaPtr f_less(LinearTerm a, LinearTerm b);
FormulaPtr f_greater(LinearTerm a, LinearTerm b);
FormulaPtr f_eq(LinearTerm a, LinearTerm b);
// q | (b - a).
FormulaPtr f_cong(Value q, LinearTerm a, LinearTerm b);
FormulaPtr f_not(const FormulaPtr& a);
FormulaPtr f_and(std::vector<FormulaPtr> kids);
FormulaPtr f_or(std::vector<FormulaPtr> kids);
FormulaPtr f_and(const FormulaPtr& a, const FormulaPtr& b);
FormulaPtr f_or(const FormulaPtr& a, const FormulaPtr& b);
FormulaPtr f_quant(const MonoidPtr& m, Element target, VarId v, FormulaPtr guard, std::vector<FormulaPtr> bodies);
// Q{U1,0}.
FormulaPtr f_exists(VarId v, FormulaPtr guard, FormulaPtr body);

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b);

std::string print_term(const LinearTerm& t);
std::string print(const FormulaPtr& f);
FormulaPtr parse(std::string_view text, const MonoidRegistry& monoids);
FormulaPtr parse(std::string_view text);
LinearTerm parse_term(std::string_view text);

// Distinct DAG nodes, and the size of the fully unfolded tree (saturating).
std::size_t dag_size(const FormulaPtr& f);
std::uint64_t tree_size(const FormulaPtr& f);
int quantifier_depth(const FormulaPtr& f);
void for_each_node(const FormulaPtr& f, const std::function<void(const FormulaPtr&)>& fn);

// Quantifier whose guard (or every body) has !lambda(x) as a top-level conjunct.
bool is_ad_guarded(const Formula& q, char neutral);
bool is_active_domain(const FormulaPtr& f, char neutral);
// Rebuilds `f` with every atom replaced by fn(atom). Binders are not renamed.
FormulaPtr map_atoms(const FormulaPtr& f, const std::function<FormulaPtr(const FormulaPtr&)>& fn);
// Adds !lambda(x) to the guard of every quantifier that lacks it.
FormulaPtr relativize(const FormulaPtr& f, char neutral);

// Capture-avoiding, DAG-aware substitution of free variables.
FormulaPtr substitute(const FormulaPtr& f, const std::map<VarId, LinearTerm>& s);
FormulaPtr substitute(const FormulaPtr& f, VarId v, const LinearTerm& t);

// How letter atoms on compound terms are expressed through a quantifier.
struct LetterTrick {
    char neutral = '_';
    MonoidPtr monoid;
};

FormulaPtr letter_trick(char c, const LinearTerm& pos, const LetterTrick& trick);
// Rewrites every letter atom whose position is not a bare variable.
FormulaPtr rewrite_compound_letters(const FormulaPtr& f, const LetterTrick& trick);

struct NormalizedBodies {
    std::vector<FormulaPtr> bodies;
    VarId pivot = 0;
    Value divisor = 1;
};

// Every atom mentioning z becomes z < rho, z > rho, z = rho or rho - z =mod q 0 (printed z =mod q rho),
// with a common divisor n; z =mod n 0 is conjoined when n > 1. Letters on z go through the trick.
NormalizedBodies normalize_bodies(const std::vector<FormulaPtr>& bodies, VarId z, const LetterTrick& trick);

struct NormalizedFormula {
    FormulaPtr formula;
    VarId pivot = 0;
    Value divisor = 1;
};
NormalizedFormula normalize(const FormulaPtr& f, VarId z, const LetterTrick& trick);

// Numeric atom mentioning z in normalized shape: returns rho, or nullopt.
bool is_normalized_atom(const Formula& atom, VarId z);

}  // namespace adc

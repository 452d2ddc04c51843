#pragma once

#include <array>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "adc/algebra.hpp"
#include "adc/syntax.hpp"
#include "adc/words.hpp"

namespace adc {

using Assignment = std::map<VarId, Value>;

enum class OmegaVerdict { True, False, NonConvergent };
const char* verdict_name(OmegaVerdict v);
inline OmegaVerdict verdict_of(bool b) { return b ? OmegaVerdict::True : OmegaVerdict::False; }

struct OmegaPolicy {
    // Zero selects the defaults: H0 = 2(1 + max(support, assigned values)),
    // Lambda = lcm of moduli times lcm of quantifier monoid sizes.
    Value h0 = 0;
    Value lambda = 0;
    int probes = 3;
};

class Evaluator {
public:
    enum class Mode {
        // Quantifiers range over [0, horizon).
        Finite,
        // Quantifiers range over all of N; unguarded ones are handled by critical points and periodicity.
        Exact,
    };

    Evaluator(const WordModel& w, Mode mode, Value horizon = 0);

    bool eval(const FormulaPtr& f, const Assignment& a);
    // m_j for the least j whose body holds at position i, identity otherwise.
    Element u_value(const std::vector<FormulaPtr>& bodies, const MonoidTable& m, VarId z, Value i, const Assignment& a);

    std::size_t memo_entries() const { return memo_.size(); }

private:
    struct Key {
        const Formula* node;
        std::array<Value, 8> vals;
        std::uint8_t n;
        bool operator==(const Key& o) const;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    bool holds(const FormulaPtr& f);
    bool holds_uncached(const FormulaPtr& f);
    Value term(const LinearTerm& t) const;
    void bind(VarId v, Value x);
    void unbind(VarId v);
    Element select(const Formula& q);
    bool quantifier(const FormulaPtr& q);
    std::optional<Element> exact_product(const FormulaPtr& q);
    bool ad_guarded(const Formula& q);

    const WordModel& w_;
    Mode mode_;
    Value horizon_;
    std::vector<Value> env_;
    std::vector<std::uint8_t> bound_;
    std::unordered_map<Key, bool, KeyHash> memo_;
    std::unordered_map<const Formula*, bool> guarded_;
    std::vector<Value> support_;

    friend class CritWalker;
};

Element u_value(const std::vector<FormulaPtr>& bodies, const MonoidTable& m, VarId z, const WordModel& w, Value i,
                const Assignment& a);
bool eval_finite(const FormulaPtr& f, const WordModel& w, const Assignment& a, Value horizon);
OmegaVerdict eval_omega(const FormulaPtr& f, const WordModel& w, const Assignment& a, const OmegaPolicy& policy = {});
// Throws Unsupported when unguarded quantifiers nest deeper than two.
bool eval_exact(const FormulaPtr& f, const WordModel& w, const Assignment& a);
// eval_exact when supported, eval_omega otherwise.
OmegaVerdict omega_truth(const FormulaPtr& f, const WordModel& w, const Assignment& a);

Value default_lambda(const FormulaPtr& f);

}  // namespace adc

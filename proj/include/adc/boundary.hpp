#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "adc/semantics.hpp"
#include "adc/syntax.hpp"
#include "adc/words.hpp"

namespace adc {

// sum_i coeffs[i] * x_i + T[offset], over x_1 > x_2 > ... drawn from nnp.
struct ExtFunction {
    std::vector<Value> coeffs;
    std::size_t offset = 0;

    bool operator==(const ExtFunction& o) const { return coeffs == o.coeffs && offset == o.offset; }
    bool operator<(const ExtFunction& o) const {
        return offset != o.offset ? offset < o.offset : coeffs < o.coeffs;
    }
};

struct CollapseContext {
    VarId pivot = 0;
    // Free variables of the quantified formula; T is built over them.
    std::vector<VarId> free_vars;
    int s = 0;
    Value alpha_prime = 0;
    Value delta = 0;
    Value q = 1;
    int group_order = 1;
    Value p = 1;
    Value rphi = 2;
    // Linear terms rho of the atoms z (op) rho.
    std::vector<LinearTerm> R;
    // Offsets t_1..t_|T|, 0 included.
    std::vector<LinearTerm> T;
    // F[k] = F_{t_{k+1}}.
    std::vector<std::vector<ExtFunction>> F;
    // Construction budget in node visits, copied from ParamOptions.
    std::size_t max_work = 0;

    std::size_t family_size() const;
};

enum class FamilyKind {
    // Every coefficient vector over [-Delta, Delta] minus 0 of length at most s.
    Full,
    // Prefix closure of the vectors obtained from some rho by letting its variables coincide.
    Merged,
};

struct ParamOptions {
    int max_s = 3;
    int max_group = 6;
    Value max_p = 12;
    std::size_t max_family = 400;
    // Node visits allowed while building one collapsed quantifier; zero means unlimited.
    std::size_t max_work = 1000000;
    FamilyKind family = FamilyKind::Merged;
};

// Bodies must be normalized for `z`.
CollapseContext collapse_params(const std::vector<FormulaPtr>& bodies, VarId z, const std::vector<VarId>& free_vars,
                                int group_order, Value sub_threshold = 2, const ParamOptions& options = {});
std::vector<ExtFunction> extended_functions(int s, Value delta, std::size_t offset);
// Coefficient vectors of rho(d) over decreasing distinct values, for every way variables of rho can coincide.
std::vector<std::vector<Value>> merged_coefficients(const std::vector<Value>& coeffs);
LinearTerm instantiate(const ExtFunction& f, const std::vector<VarId>& xs, const CollapseContext& ctx);

class BoundarySet {
public:
    BoundarySet() = default;
    BoundarySet(std::vector<std::vector<Value>> per_offset);

    const std::vector<Value>& points() const { return points_; }
    // Sorted, non-negative, per offset index.
    const std::vector<std::vector<Value>>& per_offset() const { return per_offset_; }
    bool contains(Value x) const;
    bool offset_contains(std::size_t k, Value x) const;

    // Point b_i has id 2i+1; the interval below b_1 has id 0, between b_i and b_{i+1} id 2i+2.
    std::size_t interval_of(Value x) const;
    // Length of the gap to the left / right of a boundary point; nullopt stands for infinity.
    Value il(Value b) const;
    std::optional<Value> ir(Value b) const;

private:
    std::size_t index_of(Value b) const;
    std::vector<Value> points_;
    std::vector<std::vector<Value>> per_offset_;
};

BoundarySet boundary_points(const WordModel& w, const Assignment& a, const CollapseContext& ctx);
Value offset_value(const CollapseContext& ctx, std::size_t k, const Assignment& a);

// Brute-force N_k / N^_k over concrete boundary points.
// With disjoint_levels, level k only uses points of B_{t_k} absent from earlier levels.
class NkOracle {
public:
    NkOracle(const BoundarySet& B, const MonoidTable& G, std::function<Element(Value)> u, Value p,
             bool disjoint_levels = false);

    Element n(int k, Value b);
    Element nhat(int k, Value b);
    Element x(int k, Value b);
    int levels() const { return static_cast<int>(B_.per_offset().size()); }

private:
    const BoundarySet& B_;
    const MonoidTable& G_;
    std::function<Element(Value)> u_;
    Value p_;
    bool disjoint_;
    std::map<std::pair<int, Value>, Element> n_memo_, nhat_memo_;
    std::map<Value, Element> u_memo_;
    Element u(Value i);
    Element range(Value from, Value to);
};

// u is read off the normalized bodies at each position.
Element nk_oracle(const WordModel& w, const Assignment& a, int k, Value b, const CollapseContext& ctx,
                  const std::vector<FormulaPtr>& bodies, const MonoidTable& G);
Element nkhat_oracle(const WordModel& w, const Assignment& a, int k, Value b, const CollapseContext& ctx,
                     const std::vector<FormulaPtr>& bodies, const MonoidTable& G);

// Exact product of u over N when u is determined by interval and residue mod q;
// nullopt when a non-identity letter occurs in the infinite interval.
std::optional<Element> interval_eval_quant(const std::vector<FormulaPtr>& bodies, VarId z, const MonoidTable& G,
                                           const WordModel& w, const Assignment& a, const BoundarySet& B, Value q);

}  // namespace adc

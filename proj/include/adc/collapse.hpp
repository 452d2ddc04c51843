#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "adc/boundary.hpp"
#include "adc/syntax.hpp"

namespace adc {

struct CollapseOptions {
    char neutral = '_';
    ParamOptions params;
    bool trace = false;
    std::size_t max_trace = 400;
};

using Trace = std::vector<std::pair<std::string, FormulaPtr>>;

struct CollapseResult {
    FormulaPtr formula;
    Value threshold = 2;
    Trace trace;
};

// Builds the active-domain replacement of one unguarded group quantifier Q{G,m} z <bodies>.
// Bodies must already be normalized for z and active-domain.
class GroupCollapser {
public:
    GroupCollapser(MonoidPtr G, Element target, std::vector<FormulaPtr> bodies, CollapseContext ctx, char neutral,
                   Trace* trace = nullptr, std::size_t max_trace = 0);
    ~GroupCollapser();
    GroupCollapser(const GroupCollapser&) = delete;
    GroupCollapser& operator=(const GroupCollapser&) = delete;

    FormulaPtr build();

    // Families, indexed by element. `f` is a function of F given by offset index and coefficients;
    // its variables are the parameter variables of level `level`.
    FormulaPtr delta(Value l, const ExtFunction& f, int level);
    std::vector<FormulaPtr> pi(const ExtFunction& f, int level, Value base, Value len);
    std::vector<FormulaPtr> nu(int k, const ExtFunction& f, int level, bool hat);
    std::vector<FormulaPtr> gamma(int k, const ExtFunction& fprime, const ExtFunction& f, int level, bool hat);
    std::vector<FormulaPtr> tree(int k, const ExtFunction& f, int level, bool hat);
    FormulaPtr u_is(Element g, const LinearTerm& pos);
    FormulaPtr tail_guard();

    const std::vector<VarId>& params(int level) const;
    const CollapseContext& context() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Existence of a witness for one U_1 body, normalized for ctx.pivot.
FormulaPtr collapse_u1_witness(const MonoidPtr& M, const FormulaPtr& body, const CollapseContext& ctx, char neutral);

// Replaces every atom mentioning z: z > rho -> true, z < rho -> false, z = rho -> false,
// z =mod q' rho -> residue e in place of z.
FormulaPtr tail_substitute(const FormulaPtr& body, VarId z, Value e);

CollapseResult collapse_group_quant(const FormulaPtr& q, const CollapseOptions& opts = {});
CollapseResult collapse_u1_quant(const FormulaPtr& q, const CollapseOptions& opts = {});
CollapseResult collapse(const FormulaPtr& phi, const CollapseOptions& opts = {});

struct RamseyOptions {
    std::size_t min_size = 3;
    // Atoms with more variables are rejected.
    std::size_t max_arity = 8;
    // When atom-by-atom shrinking fails, X up to this size is searched jointly.
    std::size_t max_joint = 16;
};

struct RamseyResult {
    FormulaPtr formula;
    std::vector<Value> Y;
    std::size_t atoms = 0;
};

// Replaces every numeric atom that is not a comparison of two variables by its order-type formula,
// shrinking X until each atom is homogeneous.
RamseyResult ramsey_reduce(const FormulaPtr& phi, const std::vector<Value>& X, const RamseyOptions& opts = {});
bool is_order_only(const FormulaPtr& f);
// Truth of the atom is constant on every weak order type of its variables over Y^k.
bool atom_homogeneous(const FormulaPtr& atom, const std::vector<Value>& Y);

struct PipelineOptions {
    CollapseOptions collapse;
    RamseyOptions ramsey;
    int max_exp = 8;
    // Zero selects the collapse threshold.
    Value r = 0;
};

struct PipelineResult {
    CollapseResult collapsed;
    RamseyResult reduced;
    Value r = 0;
};

PipelineResult pipeline(const FormulaPtr& phi, const PipelineOptions& opts = {});

}  // namespace adc

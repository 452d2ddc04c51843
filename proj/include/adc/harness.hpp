#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "adc/boundary.hpp"
#include "adc/collapse.hpp"
#include "adc/semantics.hpp"
#include "adc/sorting_tree.hpp"
#include "adc/words.hpp"

namespace adc {

struct Counterexample {
    WordModel word;
    Assignment assignment;
    OmegaVerdict lhs = OmegaVerdict::False;
    OmegaVerdict rhs = OmegaVerdict::False;
    std::string note;
};

struct EquivReport {
    std::size_t total = 0;
    std::size_t agreements = 0;
    std::size_t nonconvergent = 0;
    // Of nonconvergent, those where the right-hand side failed to stabilize.
    std::size_t rhs_nonconvergent = 0;
    // Instances whose precondition failed; not part of total.
    std::size_t skipped = 0;
    std::vector<Counterexample> counterexamples;
    // Failures beyond the stored list.
    std::size_t dropped = 0;

    std::size_t failures() const { return counterexamples.size() + dropped; }
    bool consistent() const { return total == agreements + failures() + nonconvergent; }
    bool passed() const { return failures() == 0 && nonconvergent == 0; }
    void add_failure(Counterexample c, std::size_t keep = 20);
    void merge(const EquivReport& o, std::size_t keep = 20);
};

struct Sample {
    WordModel word;
    Assignment assignment;
};

struct SamplerConfig {
    std::uint64_t seed = 1;
    // One sample batch per base.
    std::vector<Value> radices{4};
    int max_exp = 5;
    int max_support = 4;
    std::size_t samples_per_r = 100;
    // All support subsets up to this size come first, letters drawn from the seed.
    std::size_t exhaustive_size = 3;
    std::string letters = "ab";
    char neutral = '_';
    unsigned threads = 1;
    std::size_t keep_counterexamples = 20;
};

// Words with nnp inside D_r and assignments into D_r plus 0.
std::vector<Sample> sample_instances(const std::vector<VarId>& free_vars, Value r, const SamplerConfig& config,
                                     std::uint64_t seed);

// Verdicts come from omega_truth on both sides.
EquivReport equivalence_on(const FormulaPtr& phi, const FormulaPtr& psi, const std::vector<Sample>& samples,
                           unsigned threads = 1, std::size_t keep = 20);
EquivReport equivalence_check(const FormulaPtr& phi, const FormulaPtr& psi, const SamplerConfig& config);

struct InvarianceConfig {
    std::uint64_t seed = 1;
    std::size_t trials = 1000;
    int max_length = 40;
    int max_edits = 4;
    std::string letters = "ab";
    char neutral = '_';
};

// Each trial compares a random word with a copy edited by neutral insertions and deletions.
EquivReport neutral_invariance_check(const FormulaPtr& psi, const InvarianceConfig& config);

struct SuiteConfig {
    std::uint64_t seed = 1;
    std::size_t instances = 100;
    int max_exp = 4;
    // Fewer exponents are used when r^max_exp would pass this bound.
    Value max_position = 20000;
    std::string letters = "ab";
    char neutral = '_';
    // Quantifier depth of the generated quantifier, counting itself.
    int depth = 3;
    // Lets the body generator emit unguarded inner quantifiers.
    bool allow_non_active_domain = false;
    // Base offsets added to the collapse threshold.
    Value extra_r = 0;
    FamilyKind family = FamilyKind::Merged;
    std::size_t keep_counterexamples = 20;
};

const std::vector<std::string>& suite_names();
EquivReport lemma_suite(std::string_view name, const SuiteConfig& config);

enum class TreeCheck { Order, Separation };

// Order: leaves non-decreasing and the non-negative leaves equal B_t as a set.
// Separation: child bounds and strict sibling separation. `note` receives the first failed check.
bool tree_check(Value t, const std::vector<Value>& nnp, const TreeParams& params, TreeCheck which,
                std::string* note = nullptr);

struct CorpusConfig {
    std::uint64_t seed = 1;
    std::size_t count = 50;
    int max_depth = 2;
    std::string letters = "ab";
    char neutral = '_';
    // Formulas rejected by collapse caps are replaced; at most this many attempts per slot.
    int attempts = 40;
    // Also replace formulas whose collapse folds to true or false.
    bool reject_constant = true;
    ParamOptions params;
};

struct CorpusStats {
    std::size_t size_cap = 0;
    std::size_t constant = 0;
};

struct CorpusEntry {
    FormulaPtr formula;
    CollapseResult collapsed;
};

// Random formulas over U1, C2, C3, S3 with at most two free variables (x, y) and at most two moduli.
FormulaPtr random_formula(std::mt19937_64& rng, const CorpusConfig& config);
std::vector<CorpusEntry> generate_corpus(const CorpusConfig& config, CorpusStats* stats = nullptr);

}  // namespace adc

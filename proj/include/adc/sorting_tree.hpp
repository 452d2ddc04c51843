#pragma once

#include <memory>
#include <string>
#include <vector>

#include "adc/value.hpp"

namespace adc {

struct TreeParams {
    int s = 1;
    Value delta = 1;
    Value r = 4;
    // Only require r > 2*delta (enough for balanced base-r digits).
    bool relaxed = false;
};

struct TreeNode {
    // f = offset + sum coeffs[i] * x_{i+1}
    std::vector<Value> coeffs;
    Value offset = 0;
    // assignment[i] = A(x_{i+1}), strictly decreasing.
    std::vector<Value> assignment;
    bool leaf = false;
    std::vector<std::unique_ptr<TreeNode>> children;

    Value value() const;
    std::string label() const;
};

std::unique_ptr<TreeNode> build_tree(Value t, std::vector<Value> nnp, const TreeParams& params);

std::vector<Value> leaves(const TreeNode& root);
std::size_t tree_depth(const TreeNode& root);

// Children of a node whose smallest assigned position is r^c lie in [v - delta r^(c-1), v + delta r^(c-1)]
// and increase from left to right. Vacuous at the root.
bool check_child_bounds(const TreeNode& node, const TreeParams& params);
// Every pair of neighboring siblings: max leaf on the left < min leaf on the right.
bool check_neighbor_separation(const TreeNode& node);

// Indented text rendering, one node per line.
std::string render_tree(const TreeNode& root);

}  // namespace adc

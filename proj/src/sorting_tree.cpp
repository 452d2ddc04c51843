#include "adc/sorting_tree.hpp"

#include <algorithm>
#include <sstream>

namespace adc {

Value TreeNode::value() const {
    Value v = offset;
    for (std::size_t i = 0; i < coeffs.size(); ++i) v = checked_add(v, checked_mul(coeffs[i], assignment[i]));
    return v;
}

std::string TreeNode::label() const {
    std::string f;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        Value c = coeffs[i];
        std::string name = "x" + std::to_string(i + 1);
        if (f.empty()) {
            f += c == 1 ? name : c == -1 ? "-" + name : to_string(c) + name;
        } else {
            f += c < 0 ? " - " : " + ";
            Value a = abs_value(c);
            f += a == 1 ? name : to_string(a) + name;
        }
    }
    if (f.empty()) {
        f = to_string(offset);
    } else if (offset != 0) {
        f += (offset < 0 ? " - " : " + ") + to_string(abs_value(offset));
    }
    std::string a;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (i) a += ",";
        a += "x" + std::to_string(i + 1) + "=" + to_string(assignment[i]);
    }
    return "(" + f + ", {" + a + "})";
}

namespace {

void expand(TreeNode& node, const std::vector<Value>& nnp_desc, const TreeParams& p) {
    const std::size_t l = node.coeffs.size();
    std::vector<Value> js;
    if (static_cast<int>(l) < p.s) {
        for (Value j : nnp_desc) {
            if (l == 0 || j < node.assignment.back()) js.push_back(j);
        }
    }
    auto child = [&](Value alpha, Value j) {
        auto c = std::make_unique<TreeNode>();
        c->coeffs = node.coeffs;
        c->coeffs.push_back(alpha);
        c->offset = node.offset;
        c->assignment = node.assignment;
        c->assignment.push_back(j);
        expand(*c, nnp_desc, p);
        node.children.push_back(std::move(c));
    };
    // js is descending.
    for (Value j : js) {
        for (Value a = -p.delta; a <= -1; ++a) child(a, j);
    }
    auto mid = std::make_unique<TreeNode>();
    mid->coeffs = node.coeffs;
    mid->offset = node.offset;
    mid->assignment = node.assignment;
    mid->leaf = true;
    node.children.push_back(std::move(mid));
    for (auto it = js.rbegin(); it != js.rend(); ++it) {
        for (Value a = 1; a <= p.delta; ++a) child(a, *it);
    }
}

void collect(const TreeNode& n, std::vector<Value>& out) {
    if (n.leaf) {
        out.push_back(n.value());
        return;
    }
    for (auto& c : n.children) collect(*c, out);
}

}  // namespace

std::unique_ptr<TreeNode> build_tree(Value t, std::vector<Value> nnp, const TreeParams& params) {
    const Value need = params.relaxed ? 2 * params.delta : 3 * params.s * params.delta;
    if (params.r <= need) {
        throw Error(Errc::BaseTooSmall, "base " + to_string(params.r) + " must exceed " + to_string(need));
    }
    std::sort(nnp.begin(), nnp.end(), std::greater<>());
    nnp.erase(std::unique(nnp.begin(), nnp.end()), nnp.end());
    auto root = std::make_unique<TreeNode>();
    root->offset = t;
    expand(*root, nnp, params);
    return root;
}

std::vector<Value> leaves(const TreeNode& root) {
    std::vector<Value> out;
    collect(root, out);
    return out;
}

std::size_t tree_depth(const TreeNode& root) {
    std::size_t d = 0;
    for (auto& c : root.children) d = std::max(d, tree_depth(*c));
    return d + 1;
}

bool check_child_bounds(const TreeNode& node, const TreeParams& params) {
    if (node.leaf) return true;
    for (std::size_t i = 1; i < node.children.size(); ++i) {
        if (node.children[i - 1]->value() > node.children[i]->value()) return false;
    }
    if (!node.assignment.empty()) {
        // Smallest assigned position is r^c; the spread is delta * r^(c-1).
        const Value spread = params.delta * (node.assignment.back() / params.r);
        const Value v = node.value();
        for (auto& c : node.children) {
            Value cv = c->value();
            if (cv < v - spread || cv > v + spread) return false;
        }
    }
    for (auto& c : node.children) {
        if (!check_child_bounds(*c, params)) return false;
    }
    return true;
}

bool check_neighbor_separation(const TreeNode& node) {
    for (std::size_t i = 1; i < node.children.size(); ++i) {
        auto left = leaves(*node.children[i - 1]);
        auto right = leaves(*node.children[i]);
        if (!left.empty() && !right.empty() &&
            *std::max_element(left.begin(), left.end()) >= *std::min_element(right.begin(), right.end())) {
            return false;
        }
    }
    for (auto& c : node.children) {
        if (!check_neighbor_separation(*c)) return false;
    }
    return true;
}

namespace {

void render(const TreeNode& n, int depth, std::ostringstream& os) {
    os << std::string(static_cast<std::size_t>(depth) * 2, ' ') << (n.leaf ? "((" : "") << n.label() << " = "
       << to_string(n.value()) << (n.leaf ? "))" : "") << '\n';
    for (auto& c : n.children) render(*c, depth + 1, os);
}

}  // namespace

std::string render_tree(const TreeNode& root) {
    std::ostringstream os;
    render(root, 0, os);
    return os.str();
}

}  // namespace adc

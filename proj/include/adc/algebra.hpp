#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "adc/value.hpp"

namespace adc {

// Index of a monoid element inside its table.
using Element = int;

class MonoidTable {
public:
    MonoidTable(std::string name, std::vector<std::string> element_names, Element identity,
                std::vector<Element> table, std::vector<Element> ordering);

    const std::string& name() const { return name_; }
    int size() const { return static_cast<int>(names_.size()); }
    Element identity() const { return identity_; }
    Element mul(Element a, Element b) const { return table_[static_cast<std::size_t>(a * size() + b)]; }
    Element power(Element a, Value k) const;

    // m_1..m_K: the non-identity elements in quantifier-body order.
    const std::vector<Element>& ordering() const { return ordering_; }
    int arity() const { return static_cast<int>(ordering_.size()); }

    const std::string& element_name(Element e) const { return names_.at(static_cast<std::size_t>(e)); }
    Element element(std::string_view name) const;
    bool has_element(std::string_view name) const;

    bool is_group() const { return is_group_; }
    Element inverse(Element a) const;
    // Two-element monoid whose non-identity element is idempotent.
    bool is_u1() const;

    // a^(index) = a^(index+period); max index and lcm of periods over all elements.
    int max_index() const { return max_index_; }
    int period_lcm() const { return period_lcm_; }

private:
    std::string name_;
    std::vector<std::string> names_;
    Element identity_;
    std::vector<Element> table_;
    std::vector<Element> ordering_;
    std::vector<Element> inverse_;
    bool is_group_ = false;
    int max_index_ = 0;
    int period_lcm_ = 1;
};

using MonoidPtr = std::shared_ptr<const MonoidTable>;

struct GroupTable {
    MonoidPtr base;
    std::vector<Element> inv;
};

MonoidPtr make_monoid(std::string name, std::vector<std::string> elements, const std::string& identity,
                      const std::vector<std::vector<std::string>>& table,
                      const std::vector<std::string>& ordering = {});
MonoidPtr make_cyclic(int q);
MonoidPtr make_symmetric(int n);
MonoidPtr make_u1();
GroupTable make_group(const MonoidPtr& m);

Element product(const MonoidTable& m, const std::vector<Element>& seq);
int order_of(const MonoidTable& g, Element a);
bool divides(const MonoidTable& m, const MonoidTable& n);

// "U1", "C<q>", "S<n>".
MonoidPtr builtin_monoid(std::string_view name);
MonoidPtr monoid_from_json(std::string_view json_text, const std::string& fallback_name);

class MonoidRegistry {
public:
    void add(MonoidPtr m);
    void load_file(const std::string& path);
    // Registered monoids first, builtins otherwise.
    MonoidPtr resolve(std::string_view name) const;

private:
    std::map<std::string, MonoidPtr, std::less<>> custom_;
};

}  // namespace adc

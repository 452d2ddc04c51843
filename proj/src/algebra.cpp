#include "adc/algebra.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace adc {

MonoidTable::MonoidTable(std::string name, std::vector<std::string> element_names, Element identity,
                         std::vector<Element> table, std::vector<Element> ordering)
    : name_(std::move(name)),
      names_(std::move(element_names)),
      identity_(identity),
      table_(std::move(table)),
      ordering_(std::move(ordering)) {
    const int n = size();
    inverse_.assign(static_cast<std::size_t>(n), -1);
    is_group_ = true;
    for (Element a = 0; a < n; ++a) {
        for (Element b = 0; b < n; ++b) {
            if (mul(a, b) == identity_ && mul(b, a) == identity_) inverse_[static_cast<std::size_t>(a)] = b;
        }
        if (inverse_[static_cast<std::size_t>(a)] < 0) is_group_ = false;
    }
    for (Element a = 0; a < n; ++a) {
        std::vector<int> seen(static_cast<std::size_t>(n), -1);
        Element x = a;
        int k = 1;
        while (seen[static_cast<std::size_t>(x)] < 0) {
            seen[static_cast<std::size_t>(x)] = k;
            x = mul(x, a);
            ++k;
        }
        int index = seen[static_cast<std::size_t>(x)];
        int period = k - index;
        max_index_ = std::max(max_index_, index);
        period_lcm_ = std::lcm(period_lcm_, period);
    }
}

Element MonoidTable::power(Element a, Value k) const {
    Element result = identity_;
    Element base = a;
    while (k > 0) {
        if (k & 1) result = mul(result, base);
        base = mul(base, base);
        k >>= 1;
    }
    return result;
}

Element MonoidTable::element(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return static_cast<Element>(i);
    }
    throw Error(Errc::UnknownElement, "monoid " + name_ + " has no element '" + std::string(name) + "'");
}

bool MonoidTable::has_element(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

Element MonoidTable::inverse(Element a) const {
    Element b = inverse_.at(static_cast<std::size_t>(a));
    if (b < 0) throw Error(Errc::NotAGroup, name_ + " is not a group");
    return b;
}

bool MonoidTable::is_u1() const {
    if (size() != 2) return false;
    Element e = identity_ == 0 ? 1 : 0;
    return mul(e, e) == e;
}

namespace {

void validate(const std::string& name, int n, Element identity, const std::vector<Element>& table,
              const std::vector<Element>& ordering) {
    if (n > 120) throw Error(Errc::TooLarge, name + ": more than 120 elements");
    for (Element a = 0; a < n; ++a) {
        for (Element b = 0; b < n; ++b) {
            for (Element c = 0; c < n; ++c) {
                auto ab = table[static_cast<std::size_t>(a * n + b)];
                auto bc = table[static_cast<std::size_t>(b * n + c)];
                if (table[static_cast<std::size_t>(ab * n + c)] != table[static_cast<std::size_t>(a * n + bc)]) {
                    throw Error(Errc::NotAssociative, name + ": table is not associative");
                }
            }
        }
    }
    for (Element a = 0; a < n; ++a) {
        if (table[static_cast<std::size_t>(identity * n + a)] != a ||
            table[static_cast<std::size_t>(a * n + identity)] != a) {
            throw Error(Errc::NoIdentity, name + ": declared identity is not neutral");
        }
    }
    std::vector<Element> sorted = ordering;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Element> expected;
    for (Element a = 0; a < n; ++a) {
        if (a != identity) expected.push_back(a);
    }
    if (sorted != expected) throw Error(Errc::InvalidOrder, name + ": ordering must list every non-identity element once");
}

MonoidPtr build(std::string name, std::vector<std::string> names, Element identity, std::vector<Element> table,
                std::vector<Element> ordering) {
    validate(name, static_cast<int>(names.size()), identity, table, ordering);
    return std::make_shared<const MonoidTable>(std::move(name), std::move(names), identity, std::move(table),
                                               std::move(ordering));
}

std::vector<Element> default_ordering(int n, Element identity) {
    std::vector<Element> ord;
    for (Element a = 0; a < n; ++a) {
        if (a != identity) ord.push_back(a);
    }
    return ord;
}

}  // namespace

MonoidPtr make_monoid(std::string name, std::vector<std::string> elements, const std::string& identity,
                      const std::vector<std::vector<std::string>>& table, const std::vector<std::string>& ordering) {
    const int n = static_cast<int>(elements.size());
    auto index_of = [&](const std::string& s) -> Element {
        auto it = std::find(elements.begin(), elements.end(), s);
        if (it == elements.end()) throw Error(Errc::UnknownElement, name + ": unknown element '" + s + "'");
        return static_cast<Element>(it - elements.begin());
    };
    auto it = std::find(elements.begin(), elements.end(), identity);
    if (it == elements.end()) throw Error(Errc::NoIdentity, name + ": identity is not an element");
    Element id = static_cast<Element>(it - elements.begin());
    if (static_cast<int>(table.size()) != n) throw Error(Errc::InvalidArgument, name + ": table has wrong size");
    std::vector<Element> flat;
    for (const auto& row : table) {
        if (static_cast<int>(row.size()) != n) throw Error(Errc::InvalidArgument, name + ": table row has wrong size");
        for (const auto& cell : row) flat.push_back(index_of(cell));
    }
    std::vector<Element> ord;
    if (ordering.empty()) {
        ord = default_ordering(n, id);
    } else {
        for (const auto& s : ordering) ord.push_back(index_of(s));
    }
    return build(std::move(name), std::move(elements), id, std::move(flat), std::move(ord));
}

MonoidPtr make_cyclic(int q) {
    if (q < 1) throw Error(Errc::InvalidArgument, "cyclic group order must be positive");
    if (q > 120) throw Error(Errc::TooLarge, "cyclic group too large");
    std::vector<std::string> names;
    for (int i = 0; i < q; ++i) names.push_back(i == 0 ? "1" : i == 1 ? "g" : "g" + std::to_string(i));
    std::vector<Element> table;
    for (int a = 0; a < q; ++a) {
        for (int b = 0; b < q; ++b) table.push_back((a + b) % q);
    }
    return build("C" + std::to_string(q), std::move(names), 0, std::move(table), default_ordering(q, 0));
}

namespace {

std::string cycle_name(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (seen[static_cast<std::size_t>(i)] || perm[static_cast<std::size_t>(i)] == i) continue;
        out += "(";
        int j = i;
        while (!seen[static_cast<std::size_t>(j)]) {
            seen[static_cast<std::size_t>(j)] = true;
            out += std::to_string(j + 1);
            j = perm[static_cast<std::size_t>(j)];
        }
        out += ")";
    }
    return out.empty() ? "1" : out;
}

}  // namespace

MonoidPtr make_symmetric(int n) {
    if (n < 1) throw Error(Errc::InvalidArgument, "symmetric group degree must be positive");
    if (n > 5) throw Error(Errc::TooLarge, "symmetric groups are limited to degree 5");
    std::vector<std::vector<int>> perms;
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    do {
        perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    std::map<std::vector<int>, Element> index;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < perms.size(); ++i) {
        index[perms[i]] = static_cast<Element>(i);
        names.push_back(cycle_name(perms[i]));
    }
    std::vector<Element> table;
    for (const auto& a : perms) {
        for (const auto& b : perms) {
            std::vector<int> c(static_cast<std::size_t>(n));
            for (int x = 0; x < n; ++x) c[static_cast<std::size_t>(x)] = a[static_cast<std::size_t>(b[static_cast<std::size_t>(x)])];
            table.push_back(index.at(c));
        }
    }
    const int size = static_cast<int>(perms.size());
    return build("S" + std::to_string(n), std::move(names), 0, std::move(table), default_ordering(size, 0));
}

MonoidPtr make_u1() {
    return build("U1", {"0", "1"}, 1, {0, 0, 0, 1}, {0});
}

GroupTable make_group(const MonoidPtr& m) {
    if (!m->is_group()) throw Error(Errc::NotAGroup, m->name() + " is not a group");
    GroupTable g{m, {}};
    for (Element a = 0; a < m->size(); ++a) g.inv.push_back(m->inverse(a));
    return g;
}

Element product(const MonoidTable& m, const std::vector<Element>& seq) {
    Element acc = m.identity();
    for (Element e : seq) acc = m.mul(acc, e);
    return acc;
}

int order_of(const MonoidTable& g, Element a) {
    if (!g.is_group()) throw Error(Errc::NotAGroup, g.name() + " is not a group");
    Element x = a;
    int k = 1;
    while (x != g.identity()) {
        x = g.mul(x, a);
        ++k;
    }
    return k;
}

namespace {

// Surjective monoid morphism from the submonoid `sub` of n onto m, by backtracking.
bool has_surjection(const MonoidTable& m, const MonoidTable& n, const std::vector<Element>& sub) {
    std::map<Element, Element> image;
    const std::size_t k = sub.size();
    std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
        if (i == k) {
            std::vector<bool> hit(static_cast<std::size_t>(m.size()), false);
            for (auto& [a, b] : image) hit[static_cast<std::size_t>(b)] = true;
            return std::all_of(hit.begin(), hit.end(), [](bool v) { return v; });
        }
        Element a = sub[i];
        for (Element b = 0; b < m.size(); ++b) {
            if (a == n.identity() && b != m.identity()) continue;
            image[a] = b;
            bool ok = true;
            for (auto& [x, fx] : image) {
                for (auto& [y, fy] : image) {
                    auto it = image.find(n.mul(x, y));
                    if (it != image.end() && it->second != m.mul(fx, fy)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) break;
            }
            if (ok && go(i + 1)) return true;
            image.erase(a);
        }
        return false;
    };
    return go(0);
}

}  // namespace

bool divides(const MonoidTable& m, const MonoidTable& n) {
    if (n.size() > 8 || m.size() > 8) throw Error(Errc::TooLarge, "divides is limited to monoids of size <= 8");
    const int size = n.size();
    std::vector<Element> others;
    for (Element a = 0; a < size; ++a) {
        if (a != n.identity()) others.push_back(a);
    }
    for (std::uint32_t mask = 0; mask < (1u << others.size()); ++mask) {
        std::vector<Element> sub{n.identity()};
        for (std::size_t i = 0; i < others.size(); ++i) {
            if (mask & (1u << i)) sub.push_back(others[i]);
        }
        if (static_cast<int>(sub.size()) < m.size()) continue;
        std::vector<bool> in(static_cast<std::size_t>(size), false);
        for (Element a : sub) in[static_cast<std::size_t>(a)] = true;
        bool closed = true;
        for (Element a : sub) {
            for (Element b : sub) closed = closed && in[static_cast<std::size_t>(n.mul(a, b))];
        }
        if (closed && has_surjection(m, n, sub)) return true;
    }
    return false;
}

namespace {

MonoidPtr make_builtin(std::string_view name) {
    auto number = [&](std::string_view digits) -> int {
        if (digits.empty() || digits.size() > 3) throw Error(Errc::UnknownMonoid, "unknown monoid '" + std::string(name) + "'");
        int v = 0;
        for (char c : digits) {
            if (c < '0' || c > '9') throw Error(Errc::UnknownMonoid, "unknown monoid '" + std::string(name) + "'");
            v = v * 10 + (c - '0');
        }
        return v;
    };
    if (name == "U1") return make_u1();
    if (name.size() >= 2 && name[0] == 'C') return make_cyclic(number(name.substr(1)));
    if (name.size() >= 2 && name[0] == 'S') return make_symmetric(number(name.substr(1)));
    throw Error(Errc::UnknownMonoid, "unknown monoid '" + std::string(name) + "'");
}

}  // namespace

MonoidPtr builtin_monoid(std::string_view name) {
    static std::mutex mu;
    static std::map<std::string, MonoidPtr, std::less<>> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(name); it != cache.end()) return it->second;
    auto m = make_builtin(name);
    cache.emplace(std::string(name), m);
    return m;
}

MonoidPtr monoid_from_json(std::string_view json_text, const std::string& fallback_name) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("monoid file: ") + e.what());
    }
    try {
        std::string name = j.value("name", fallback_name);
        auto elements = j.at("elements").get<std::vector<std::string>>();
        auto identity = j.at("identity").get<std::string>();
        auto table = j.at("table").get<std::vector<std::vector<std::string>>>();
        std::vector<std::string> ordering;
        if (j.contains("ordering")) ordering = j.at("ordering").get<std::vector<std::string>>();
        return make_monoid(std::move(name), std::move(elements), identity, table, ordering);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("monoid file: ") + e.what());
    }
}

void MonoidRegistry::add(MonoidPtr m) { custom_[m->name()] = std::move(m); }

void MonoidRegistry::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidArgument, "cannot open monoid file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string stem = path;
    if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
    if (auto dot = stem.find('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    add(monoid_from_json(buf.str(), stem));
}

MonoidPtr MonoidRegistry::resolve(std::string_view name) const {
    if (auto it = custom_.find(name); it != custom_.end()) return it->second;
    return builtin_monoid(name);
}

}  // namespace adc

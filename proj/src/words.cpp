#include "adc/words.hpp"

#include <algorithm>
#include <cctype>
#include <random>

namespace adc {

Alphabet Alphabet::of(std::string_view letters, char neutral) {
    Alphabet a;
    a.letters.assign(letters.begin(), letters.end());
    if (!a.contains(neutral)) a.letters.push_back(neutral);
    a.neutral = neutral;
    return a;
}

bool Alphabet::contains(char c) const { return std::find(letters.begin(), letters.end(), c) != letters.end(); }

WordModel::WordModel(char neutral, std::map<Value, char> support) : neutral_(neutral) {
    for (auto& [p, c] : support) set(p, c);
}

char WordModel::letter_at(Value i) const {
    auto it = support_.find(i);
    return it == support_.end() ? neutral_ : it->second;
}

bool WordModel::is_neutral_at(Value i) const { return i >= 0 && support_.find(i) == support_.end(); }

std::vector<Value> WordModel::nnp() const {
    std::vector<Value> out;
    out.reserve(support_.size());
    for (auto& [p, c] : support_) out.push_back(p);
    return out;
}

std::string WordModel::letter_sequence() const {
    std::string out;
    for (auto& [p, c] : support_) out.push_back(c);
    return out;
}

Value WordModel::max_support() const { return support_.empty() ? -1 : support_.rbegin()->first; }

void WordModel::set(Value pos, char letter) {
    if (pos < 0) throw Error(Errc::InvalidArgument, "word positions are non-negative");
    if (letter == neutral_) {
        support_.erase(pos);
    } else {
        support_[pos] = letter;
    }
}

std::vector<Value> DomainDr::elements() const {
    if (r < 2) throw Error(Errc::InvalidArgument, "D_r needs r >= 2");
    std::vector<Value> out;
    Value x = 1;
    for (int i = 1; i <= max_exp; ++i) {
        x = checked_mul(x, r);
        out.push_back(x);
    }
    return out;
}

bool DomainDr::contains(Value x) const {
    Value y = 1;
    for (int i = 1; i <= max_exp; ++i) {
        y = checked_mul(y, r);
        if (y == x) return true;
        if (y > x) return false;
    }
    return false;
}

WordModel insert_neutral(const WordModel& w, Value at) {
    WordModel out(w.neutral());
    for (auto& [p, c] : w.support()) out.set(p >= at ? checked_add(p, 1) : p, c);
    return out;
}

WordModel delete_neutral(const WordModel& w, Value at) {
    if (!w.is_neutral_at(at)) throw Error(Errc::InvalidArgument, "position " + to_string(at) + " is not neutral");
    WordModel out(w.neutral());
    for (auto& [p, c] : w.support()) out.set(p > at ? p - 1 : p, c);
    return out;
}

WordModel sample_word(const DomainDr& d, const Alphabet& alphabet, int count, std::uint64_t seed) {
    auto dom = d.elements();
    if (count < 0 || count > static_cast<int>(dom.size())) {
        throw Error(Errc::InvalidArgument, "sample_word: count exceeds maxExp");
    }
    std::vector<char> letters;
    for (char c : alphabet.letters) {
        if (c != alphabet.neutral) letters.push_back(c);
    }
    WordModel w(alphabet.neutral);
    if (count == 0) return w;
    if (letters.empty()) throw Error(Errc::InvalidArgument, "alphabet has no non-neutral letter");
    std::mt19937_64 rng(seed);
    std::shuffle(dom.begin(), dom.end(), rng);
    std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
    for (int i = 0; i < count; ++i) w.set(dom[static_cast<std::size_t>(i)], letters[pick(rng)]);
    return w;
}

WordModel embed_order_preserving(const WordModel& w, const std::vector<Value>& target) {
    if (target.size() < w.support().size()) throw Error(Errc::TargetTooSmall, "embedding target has too few positions");
    WordModel out(w.neutral());
    std::size_t i = 0;
    for (auto& [p, c] : w.support()) out.set(target[i++], c);
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

WordModel parse_word(std::string_view text, char default_neutral) {
    text = trim(text);
    if (text.find("w={") == std::string_view::npos && text.find("w =") == std::string_view::npos &&
        text.find("neutral") == std::string_view::npos) {
        WordModel w(default_neutral);
        for (std::size_t i = 0; i < text.size(); ++i) {
            char c = text[i];
            if (c != '.') w.set(static_cast<Value>(i), c);
        }
        return w;
    }
    char neutral = default_neutral;
    std::map<Value, char> support;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(';', pos);
        if (end == std::string_view::npos) end = text.size();
        auto part = trim(text.substr(pos, end - pos));
        pos = end + 1;
        if (part.empty()) continue;
        auto eq = part.find('=');
        if (eq == std::string_view::npos) throw Error(Errc::InvalidArgument, "bad word literal part '" + std::string(part) + "'");
        auto key = trim(part.substr(0, eq));
        auto val = trim(part.substr(eq + 1));
        if (key == "neutral") {
            if (val.size() != 1) throw Error(Errc::InvalidArgument, "neutral letter must be one character");
            neutral = val[0];
        } else if (key == "w") {
            if (val.size() < 2 || val.front() != '{' || val.back() != '}') {
                throw Error(Errc::InvalidArgument, "word support must be written {pos:letter,...}");
            }
            auto inner = val.substr(1, val.size() - 2);
            std::size_t p = 0;
            while (p < inner.size()) {
                std::size_t e = inner.find(',', p);
                if (e == std::string_view::npos) e = inner.size();
                auto item = trim(inner.substr(p, e - p));
                p = e + 1;
                if (item.empty()) continue;
                auto colon = item.find(':');
                if (colon == std::string_view::npos || colon + 2 != item.size()) {
                    throw Error(Errc::InvalidArgument, "bad support entry '" + std::string(item) + "'");
                }
                support[parse_value(trim(item.substr(0, colon)))] = item[colon + 1];
            }
        } else {
            throw Error(Errc::InvalidArgument, "unknown word literal key '" + std::string(key) + "'");
        }
    }
    return WordModel(neutral, support);
}

std::string format_word(const WordModel& w) {
    std::string out = "neutral=";
    out.push_back(w.neutral());
    out += "; w={";
    bool first = true;
    for (auto& [p, c] : w.support()) {
        if (!first) out += ",";
        out += to_string(p) + ":" + c;
        first = false;
    }
    out += "}";
    return out;
}

}  // namespace adc

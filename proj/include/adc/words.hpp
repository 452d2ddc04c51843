#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "adc/value.hpp"

namespace adc {

struct Alphabet {
    std::vector<char> letters;
    char neutral = '_';

    static Alphabet of(std::string_view letters, char neutral);
    bool contains(char c) const;
};

// A word of the form u lambda^omega, stored by its non-neutral positions.
class WordModel {
public:
    WordModel() = default;
    explicit WordModel(char neutral) : neutral_(neutral) {}
    WordModel(char neutral, std::map<Value, char> support);

    char neutral() const { return neutral_; }
    const std::map<Value, char>& support() const { return support_; }
    // Positions below zero are outside the word; callers treat them as "no letter".
    char letter_at(Value i) const;
    bool is_neutral_at(Value i) const;
    std::vector<Value> nnp() const;
    // Letters read along nnp.
    std::string letter_sequence() const;
    Value max_support() const;

    void set(Value pos, char letter);
    bool operator==(const WordModel& o) const { return neutral_ == o.neutral_ && support_ == o.support_; }

private:
    char neutral_ = '_';
    std::map<Value, char> support_;
};

struct DomainDr {
    Value r = 2;
    int max_exp = 6;

    // r^1..r^maxExp.
    std::vector<Value> elements() const;
    bool contains(Value x) const;
};

WordModel insert_neutral(const WordModel& w, Value at);
// Removes the neutral letter at `at`; positions above shift down.
WordModel delete_neutral(const WordModel& w, Value at);
WordModel sample_word(const DomainDr& d, const Alphabet& alphabet, int count, std::uint64_t seed);
WordModel embed_order_preserving(const WordModel& w, const std::vector<Value>& target);

// "neutral=_; w={5:a,25:b}" or a dense form such as "..a.b" where '.' reads as the neutral letter.
WordModel parse_word(std::string_view text, char default_neutral = '_');
std::string format_word(const WordModel& w);

}  // namespace adc

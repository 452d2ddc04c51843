#include "adc/value.hpp"

#include <algorithm>

namespace adc {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NotAssociative: return "NotAssociative";
        case Errc::NoIdentity: return "NoIdentity";
        case Errc::InvalidOrder: return "InvalidOrder";
        case Errc::TooLarge: return "TooLarge";
        case Errc::SizeCap: return "SizeCap";
        case Errc::SyntaxError: return "SyntaxError";
        case Errc::UnknownMonoid: return "UnknownMonoid";
        case Errc::UnknownElement: return "UnknownElement";
        case Errc::ArityMismatch: return "ArityMismatch";
        case Errc::NoMonoidAvailable: return "NoMonoidAvailable";
        case Errc::HorizonTooSmall: return "HorizonTooSmall";
        case Errc::BodiesNotActiveDomain: return "BodiesNotActiveDomain";
        case Errc::NotBoundaryPoint: return "NotBoundaryPoint";
        case Errc::BaseTooSmall: return "BaseTooSmall";
        case Errc::NotAGroup: return "NotAGroup";
        case Errc::UnsupportedMonoid: return "UnsupportedMonoid";
        case Errc::RamseyExhausted: return "RamseyExhausted";
        case Errc::NotActiveDomain: return "NotActiveDomain";
        case Errc::UnknownSuite: return "UnknownSuite";
        case Errc::TargetTooSmall: return "TargetTooSmall";
        case Errc::Unsupported: return "Unsupported";
        case Errc::Overflow: return "Overflow";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

std::string to_string(Value v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    auto u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    std::string s;
    while (u > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

Value parse_value(std::string_view s) {
    if (s.empty()) throw Error(Errc::InvalidArgument, "empty number");
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) throw Error(Errc::InvalidArgument, "bad number '" + std::string(s) + "'");
    Value v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw Error(Errc::InvalidArgument, "bad number '" + std::string(s) + "'");
        v = checked_add(checked_mul(v, 10), s[i] - '0');
    }
    return neg ? -v : v;
}

Value checked_add(Value a, Value b) {
    Value r;
    if (__builtin_add_overflow(a, b, &r)) throw Error(Errc::Overflow, "integer overflow in addition");
    return r;
}

Value checked_mul(Value a, Value b) {
    Value r;
    if (__builtin_mul_overflow(a, b, &r)) throw Error(Errc::Overflow, "integer overflow in multiplication");
    return r;
}

Value checked_pow(Value base, unsigned exp) {
    Value r = 1;
    for (unsigned i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

Value floor_div(Value a, Value b) {
    Value q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Value ceil_div(Value a, Value b) { return -floor_div(-a, b); }

Value mod_floor(Value a, Value m) {
    Value r = a % m;
    if (r < 0) r += m < 0 ? -m : m;
    return r;
}

Value abs_value(Value v) { return v < 0 ? -v : v; }

Value gcd_value(Value a, Value b) {
    a = abs_value(a);
    b = abs_value(b);
    while (b != 0) {
        Value t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Value lcm_value(Value a, Value b) {
    if (a == 0 || b == 0) return 0;
    return checked_mul(abs_value(a) / gcd_value(a, b), abs_value(b));
}

}  // namespace adc

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace adc {

// Positions, offsets and evaluated terms. 128 bits so that r^k stays exact for
// the long embeddings used by the order-only pipeline.
using Value = __int128;

enum class Errc {
    NotAssociative,
    NoIdentity,
    InvalidOrder,
    TooLarge,
    SizeCap,
    SyntaxError,
    UnknownMonoid,
    UnknownElement,
    ArityMismatch,
    NoMonoidAvailable,
    HorizonTooSmall,
    BodiesNotActiveDomain,
    NotBoundaryPoint,
    BaseTooSmall,
    NotAGroup,
    UnsupportedMonoid,
    RamseyExhausted,
    NotActiveDomain,
    UnknownSuite,
    TargetTooSmall,
    Unsupported,
    Overflow,
    InvalidArgument,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t pos, const std::string& what)
        : Error(Errc::SyntaxError, what + " at offset " + std::to_string(pos)), pos_(pos) {}
    std::size_t pos() const { return pos_; }

private:
    std::size_t pos_;
};

std::string to_string(Value v);
Value parse_value(std::string_view s);

Value checked_add(Value a, Value b);
Value checked_mul(Value a, Value b);
Value checked_pow(Value base, unsigned exp);

Value floor_div(Value a, Value b);
Value ceil_div(Value a, Value b);
Value mod_floor(Value a, Value m);
Value abs_value(Value v);

Value gcd_value(Value a, Value b);
Value lcm_value(Value a, Value b);

struct ValueHash {
    std::size_t operator()(Value v) const noexcept {
        auto u = static_cast<unsigned __int128>(v);
        auto lo = static_cast<std::uint64_t>(u);
        auto hi = static_cast<std::uint64_t>(u >> 64);
        return static_cast<std::size_t>(lo * 0x9E3779B97F4A7C15ULL ^ (hi + 0x632BE59BD9B4E019ULL));
    }
};

}  // namespace adc

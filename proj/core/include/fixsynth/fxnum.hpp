#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "fixsynth/error.hpp"

namespace fixsynth {

using raw_t = __int128;

enum class RoundingMode { Floor, NearestEven };
enum class OverflowMode { Saturate, Wrap };

inline constexpr RoundingMode kDefaultRounding = RoundingMode::NearestEven;
inline constexpr OverflowMode kDefaultOverflow = OverflowMode::Saturate;

// Sign + iwl + fwl may not exceed this many bits.
inline constexpr int kMaxTotalBits = 64;

const char* to_string(RoundingMode rm);
const char* to_string(OverflowMode om);
RoundingMode parse_rounding(std::string_view s);
OverflowMode parse_overflow(std::string_view s);

// <signed, iwl, fwl>. The sign bit is not part of the wordlength.
struct FxFormat {
    bool is_signed = false;
    int iwl = 0;
    int fwl = 1;

    // Validating constructor; throws Error(InvalidFormat).
    static FxFormat make(bool is_signed, int iwl, int fwl);
    // Parses "s:iwl:fwl".
    static FxFormat parse(std::string_view text);

    int wordlength() const { return iwl + fwl; }
    int total_bits() const { return iwl + fwl + (is_signed ? 1 : 0); }
    bool valid() const;
    raw_t min_raw() const;
    raw_t max_raw() const;
    std::string to_string() const;

    friend bool operator==(const FxFormat&, const FxFormat&) = default;
};

struct FormatRange {
    double min;
    double max;
    double precision;
};

FormatRange format_range(const FxFormat& fmt);

class FxValue {
public:
    FxValue() = default;
    // Throws Error(InvalidArgument) when raw lies outside the format's raw range.
    FxValue(raw_t raw, const FxFormat& fmt);

    raw_t raw() const { return raw_; }
    const FxFormat& format() const { return fmt_; }
    double to_real() const;
    std::string to_string() const;

    friend bool operator==(const FxValue&, const FxValue&) = default;

private:
    struct Unchecked {};
    FxValue(raw_t raw, const FxFormat& fmt, Unchecked) : raw_(raw), fmt_(fmt) {}
    friend FxValue make_unchecked(raw_t raw, const FxFormat& fmt);

    raw_t raw_ = 0;
    FxFormat fmt_{};
};

double to_real(const FxValue& v);

FxValue quantize(double x, const FxFormat& fmt, RoundingMode rm = kDefaultRounding,
                 OverflowMode om = kDefaultOverflow);

FxValue convert(const FxValue& v, const FxFormat& dst, RoundingMode rm = kDefaultRounding,
                OverflowMode om = kDefaultOverflow);

enum class BinaryOp { Add, Sub, Mul, Div };
enum class UnaryOp { Neg, Sin, Cos, Recip };

const char* to_string(BinaryOp op);
const char* to_string(UnaryOp op);

// Division errors carry the zero divisor.
class FxDivisionByZero : public Error {
public:
    explicit FxDivisionByZero(const FxValue& divisor);
    const FxValue& divisor() const { return divisor_; }

private:
    FxValue divisor_;
};

FxValue fx_binop(BinaryOp op, const FxValue& a, const FxValue& b, const FxFormat& dst,
                 RoundingMode rm = kDefaultRounding, OverflowMode om = kDefaultOverflow);

FxValue fx_unop(UnaryOp op, const FxValue& a, const FxFormat& dst,
                RoundingMode rm = kDefaultRounding, OverflowMode om = kDefaultOverflow);

std::string raw_to_string(raw_t v);

}  // namespace fixsynth

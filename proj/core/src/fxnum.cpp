#include "fixsynth/fxnum.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace fixsynth {

FxValue make_unchecked(raw_t raw, const FxFormat& fmt);

namespace {

using u128 = unsigned __int128;

constexpr u128 kU128Max = ~static_cast<u128>(0);

u128 pow2(int k) { return static_cast<u128>(1) << k; }

// Magnitude result of a rounding step. `overflow` means the true magnitude
// did not fit in 128 bits; `mag` then holds it modulo 2^128.
struct Rounded {
    u128 mag = 0;
    bool overflow = false;
};

struct SignMag {
    bool neg = false;
    u128 mag = 0;
};

SignMag split(raw_t raw) {
    if (raw < 0) return {true, static_cast<u128>(-raw)};
    return {false, static_cast<u128>(raw)};
}

// Applies rounding to q + rem/den where 0 <= rem < den.
Rounded round_quotient(bool neg, u128 q, u128 rem, u128 den, RoundingMode rm) {
    Rounded out{q, false};
    if (rem == 0) return out;
    bool up = false;
    if (rm == RoundingMode::Floor) {
        up = neg;  // floor(-x) = -ceil(x)
    } else {
        u128 other = den - rem;
        up = rem > other || (rem == other && (q & 1) != 0);
    }
    if (up) {
        if (out.mag == kU128Max) out.overflow = true;
        out.mag += 1;
    }
    return out;
}

// Rescales mag * 2^-from to an integer count of 2^-to units with rounding.
Rounded rescale(bool neg, u128 mag, int from, int to, RoundingMode rm) {
    const int k = from - to;
    if (k == 0 || mag == 0) return {mag, false};
    if (k < 0) {
        const int s = -k;
        if (s >= 128) return {0, true};
        Rounded r{mag << s, false};
        if ((mag >> (128 - s)) != 0) r.overflow = true;
        return r;
    }
    if (k >= 128) {
        // Quotient is zero; remainder is the full magnitude.
        if (rm == RoundingMode::Floor) return {neg ? u128{1} : u128{0}, false};
        // nearest: round up only when mag > 2^(k-1)
        if (k == 128 && mag > pow2(127)) return {1, false};
        return {0, false};
    }
    const u128 q = mag >> k;
    const u128 rem = mag & (pow2(k) - 1);
    return round_quotient(neg, q, rem, pow2(k), rm);
}

FxValue finish(bool neg, const Rounded& r, const FxFormat& fmt, OverflowMode om) {
    const raw_t lo = fmt.min_raw();
    const raw_t hi = fmt.max_raw();
    if (om == OverflowMode::Saturate) {
        if (r.mag == 0 && !r.overflow) return make_unchecked(0, fmt);
        if (neg) {
            if (r.overflow || r.mag > static_cast<u128>(-lo)) return make_unchecked(lo, fmt);
            return make_unchecked(-static_cast<raw_t>(r.mag), fmt);
        }
        if (r.overflow || r.mag > static_cast<u128>(hi)) return make_unchecked(hi, fmt);
        return make_unchecked(static_cast<raw_t>(r.mag), fmt);
    }
    // Wrap: reduce modulo the size of the raw range.
    const int n = fmt.wordlength();
    const int mod_bits = fmt.is_signed ? n + 1 : n;
    const u128 mask = pow2(mod_bits) - 1;
    u128 v = r.mag & mask;
    if (neg) v = (pow2(mod_bits) - v) & mask;
    raw_t out = static_cast<raw_t>(v);
    if (fmt.is_signed && v >= pow2(n)) out -= static_cast<raw_t>(pow2(mod_bits));
    return make_unchecked(out, fmt);
}

// Exact quotient (na*ma * 2^-fa) / (nb*mb * 2^-fb) expressed in units of 2^-fd.
FxValue divide(bool na, u128 ma, int fa, bool nb, u128 mb, int fb, const FxFormat& dst,
               RoundingMode rm, OverflowMode om) {
    const bool neg = (na != nb) && ma != 0;
    const int e = dst.fwl + fb - fa;
    Rounded r;
    if (e >= 0) {
        const u128 q0 = ma / mb;
        u128 rem = ma % mb;
        u128 high = 0;
        bool overflow = false;
        if (q0 != 0) {
            overflow = e >= 128 || (e > 0 && (q0 >> (128 - e)) != 0);
            high = e >= 128 ? 0 : q0 << e;
        }
        u128 frac = 0;
        for (int i = 0; i < e; ++i) {
            rem <<= 1;
            frac <<= 1;
            if (rem >= mb) {
                rem -= mb;
                frac |= 1;
            }
        }
        r = round_quotient(neg, high | frac, rem, mb, rm);
        r.overflow = r.overflow || overflow;
    } else {
        const u128 den = mb << (-e);
        r = round_quotient(neg, ma / den, ma % den, den, rm);
    }
    return finish(neg, r, dst, om);
}

}  // namespace

FxValue make_unchecked(raw_t raw, const FxFormat& fmt) {
    return FxValue(raw, fmt, FxValue::Unchecked{});
}

const char* to_string(RoundingMode rm) {
    return rm == RoundingMode::Floor ? "floor" : "nearest";
}

const char* to_string(OverflowMode om) {
    return om == OverflowMode::Saturate ? "saturate" : "wrap";
}

RoundingMode parse_rounding(std::string_view s) {
    if (s == "floor") return RoundingMode::Floor;
    if (s == "nearest" || s == "nearest-even") return RoundingMode::NearestEven;
    throw Error(ErrorCode::InvalidArgument, "unknown rounding mode '" + std::string(s) + "'");
}

OverflowMode parse_overflow(std::string_view s) {
    if (s == "saturate") return OverflowMode::Saturate;
    if (s == "wrap") return OverflowMode::Wrap;
    throw Error(ErrorCode::InvalidArgument, "unknown overflow mode '" + std::string(s) + "'");
}

bool FxFormat::valid() const {
    return iwl >= 0 && fwl >= 0 && iwl + fwl >= 1 && total_bits() <= kMaxTotalBits;
}

FxFormat FxFormat::make(bool s, int i, int f) {
    FxFormat fmt{s, i, f};
    if (!fmt.valid()) {
        throw Error(ErrorCode::InvalidFormat,
                    "invalid fixed-point format " + fmt.to_string());
    }
    return fmt;
}

FxFormat FxFormat::parse(std::string_view text) {
    int parts[3] = {0, 0, 0};
    const char* p = text.data();
    const char* end = text.data() + text.size();
    for (int i = 0; i < 3; ++i) {
        auto [next, ec] = std::from_chars(p, end, parts[i]);
        if (ec != std::errc() || (i < 2 && (next == end || *next != ':'))) {
            throw Error(ErrorCode::InvalidFormat, "cannot parse format '" + std::string(text) + "'");
        }
        p = i < 2 ? next + 1 : next;
    }
    if (p != end || (parts[0] != 0 && parts[0] != 1)) {
        throw Error(ErrorCode::InvalidFormat, "cannot parse format '" + std::string(text) + "'");
    }
    return make(parts[0] == 1, parts[1], parts[2]);
}

raw_t FxFormat::min_raw() const {
    return is_signed ? -static_cast<raw_t>(pow2(wordlength())) : 0;
}

raw_t FxFormat::max_raw() const {
    return static_cast<raw_t>(pow2(wordlength()) - 1);
}

std::string FxFormat::to_string() const {
    return std::to_string(is_signed ? 1 : 0) + ":" + std::to_string(iwl) + ":" + std::to_string(fwl);
}

FormatRange format_range(const FxFormat& fmt) {
    const double prec = std::ldexp(1.0, -fmt.fwl);
    const double top = std::ldexp(1.0, fmt.iwl);
    return {fmt.is_signed ? -top : 0.0, top - prec, prec};
}

FxValue::FxValue(raw_t raw, const FxFormat& fmt) : raw_(raw), fmt_(fmt) {
    if (!fmt.valid()) throw Error(ErrorCode::InvalidFormat, "invalid format " + fmt.to_string());
    if (raw < fmt.min_raw() || raw > fmt.max_raw()) {
        throw Error(ErrorCode::InvalidArgument,
                    "raw " + raw_to_string(raw) + " outside range of " + fmt.to_string());
    }
}

double FxValue::to_real() const {
    return std::ldexp(static_cast<double>(raw_), -fmt_.fwl);
}

std::string FxValue::to_string() const {
    return raw_to_string(raw_) + "@" + fmt_.to_string();
}

double to_real(const FxValue& v) { return v.to_real(); }

FxValue quantize(double x, const FxFormat& fmt, RoundingMode rm, OverflowMode om) {
    if (!std::isfinite(x)) throw Error(ErrorCode::DomainError, "cannot quantize a non-finite value");
    if (!fmt.valid()) throw Error(ErrorCode::InvalidFormat, "invalid format " + fmt.to_string());
    const double s = std::ldexp(x, fmt.fwl);
    const bool neg = s < 0;
    const double a = std::fabs(s);
    Rounded r;
    if (a >= std::ldexp(1.0, 127)) {
        int ex = 0;
        const double m = std::frexp(a, &ex);
        const auto mant = static_cast<u128>(std::ldexp(m, 53));
        const int shift = ex - 53;
        r.mag = shift >= 128 ? 0 : mant << shift;
        r.overflow = true;
    } else {
        double rounded;
        if (rm == RoundingMode::Floor) {
            rounded = neg ? std::ceil(a) : std::floor(a);
        } else {
            rounded = std::nearbyint(a);
        }
        r.mag = static_cast<u128>(rounded);
    }
    return finish(neg && (r.mag != 0 || r.overflow), r, fmt, om);
}

FxValue convert(const FxValue& v, const FxFormat& dst, RoundingMode rm, OverflowMode om) {
    const SignMag a = split(v.raw());
    return finish(a.neg, rescale(a.neg, a.mag, v.format().fwl, dst.fwl, rm), dst, om);
}

const char* to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
    }
    return "?";
}

const char* to_string(UnaryOp op) {
    switch (op) {
        case UnaryOp::Neg: return "-";
        case UnaryOp::Sin: return "sin";
        case UnaryOp::Cos: return "cos";
        case UnaryOp::Recip: return "recip";
    }
    return "?";
}

FxDivisionByZero::FxDivisionByZero(const FxValue& divisor)
    : Error(ErrorCode::FixedDivisionByZero, "fixed-point division by zero (divisor " +
                                                divisor.to_string() + ")"),
      divisor_(divisor) {}

FxValue fx_binop(BinaryOp op, const FxValue& a, const FxValue& b, const FxFormat& dst,
                 RoundingMode rm, OverflowMode om) {
    if (!dst.valid()) throw Error(ErrorCode::InvalidFormat, "invalid format " + dst.to_string());
    const SignMag x = split(a.raw());
    SignMag y = split(b.raw());
    const int fa = a.format().fwl;
    const int fb = b.format().fwl;
    switch (op) {
        case BinaryOp::Sub:
            if (y.mag != 0) y.neg = !y.neg;
            [[fallthrough]];
        case BinaryOp::Add: {
            // Both aligned magnitudes stay below 2^128 because total bits <= 64.
            const int f = fa > fb ? fa : fb;
            const u128 mx = x.mag << (f - fa);
            const u128 my = y.mag << (f - fb);
            SignMag s;
            if (x.neg == y.neg) {
                s = {x.neg, mx + my};
            } else if (mx >= my) {
                s = {x.neg, mx - my};
            } else {
                s = {y.neg, my - mx};
            }
            if (s.mag == 0) s.neg = false;
            return finish(s.neg, rescale(s.neg, s.mag, f, dst.fwl, rm), dst, om);
        }
        case BinaryOp::Mul: {
            const bool neg = (x.neg != y.neg) && x.mag != 0 && y.mag != 0;
            const u128 m = x.mag * y.mag;
            return finish(neg, rescale(neg, m, fa + fb, dst.fwl, rm), dst, om);
        }
        case BinaryOp::Div:
            if (y.mag == 0) throw FxDivisionByZero(b);
            return divide(x.neg, x.mag, fa, y.neg, y.mag, fb, dst, rm, om);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown binary op");
}

FxValue fx_unop(UnaryOp op, const FxValue& a, const FxFormat& dst, RoundingMode rm,
                OverflowMode om) {
    if (!dst.valid()) throw Error(ErrorCode::InvalidFormat, "invalid format " + dst.to_string());
    const SignMag x = split(a.raw());
    switch (op) {
        case UnaryOp::Neg: {
            const bool neg = !x.neg && x.mag != 0;
            return finish(neg, rescale(neg, x.mag, a.format().fwl, dst.fwl, rm), dst, om);
        }
        case UnaryOp::Sin: return quantize(std::sin(a.to_real()), dst, rm, om);
        case UnaryOp::Cos: return quantize(std::cos(a.to_real()), dst, rm, om);
        case UnaryOp::Recip:
            if (x.mag == 0) throw FxDivisionByZero(a);
            return divide(false, 1, 0, x.neg, x.mag, a.format().fwl, dst, rm, om);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown unary op");
}

std::string raw_to_string(raw_t v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    u128 m = neg ? static_cast<u128>(-v) : static_cast<u128>(v);
    std::string s;
    while (m != 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(m % 10)));
        m /= 10;
    }
    return neg ? "-" + s : s;
}

}  // namespace fixsynth

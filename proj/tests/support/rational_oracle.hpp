#pragma once

// Exact reference for fixed-point arithmetic on small formats. Values are
// rationals N / 2^k held in __int128; rounding and overflow are applied to the
// exact result, independently of the library's sign-magnitude code.

#include <optional>

#include "fixsynth/fxnum.hpp"

namespace fixsynth::testing {

struct Rational {
    raw_t num = 0;
    raw_t den = 1;  // > 0
};

inline raw_t floor_div(raw_t n, raw_t d) {
    raw_t q = n / d;
    if ((n % d != 0) && ((n < 0) != (d < 0))) --q;
    return q;
}

inline raw_t round_rational(const Rational& v, RoundingMode rm) {
    const raw_t q = floor_div(v.num, v.den);
    if (rm == RoundingMode::Floor) return q;
    const raw_t r2 = 2 * (v.num - q * v.den);
    if (r2 < v.den) return q;
    if (r2 > v.den) return q + 1;
    return (q % 2 == 0) ? q : q + 1;
}

inline raw_t fit_raw(raw_t r, const FxFormat& f, OverflowMode om) {
    if (r >= f.min_raw() && r <= f.max_raw()) return r;
    if (om == OverflowMode::Saturate) return r < f.min_raw() ? f.min_raw() : f.max_raw();
    const raw_t m = raw_t{1} << (f.wordlength() + (f.is_signed ? 1 : 0));
    raw_t w = r % m;
    if (w < 0) w += m;
    if (f.is_signed && w > f.max_raw()) w -= m;
    return w;
}

// Value of `v` scaled into `dst`'s raw units: v * 2^fwl.
inline raw_t expected_raw(Rational v, const FxFormat& dst, RoundingMode rm, OverflowMode om) {
    v.num *= raw_t{1} << dst.fwl;
    return fit_raw(round_rational(v, rm), dst, om);
}

inline Rational as_rational(const FxValue& v) { return {v.raw(), raw_t{1} << v.format().fwl}; }

// nullopt for division by zero.
inline std::optional<Rational> exact_binop(BinaryOp op, const FxValue& a, const FxValue& b) {
    const Rational x = as_rational(a);
    const Rational y = as_rational(b);
    switch (op) {
        case BinaryOp::Add: return Rational{x.num * y.den + y.num * x.den, x.den * y.den};
        case BinaryOp::Sub: return Rational{x.num * y.den - y.num * x.den, x.den * y.den};
        case BinaryOp::Mul: return Rational{x.num * y.num, x.den * y.den};
        case BinaryOp::Div:
            if (y.num == 0) return std::nullopt;
            if (y.num < 0) return Rational{-x.num * y.den, -x.den * y.num};
            return Rational{x.num * y.den, x.den * y.num};
    }
    return std::nullopt;
}

}  // namespace fixsynth::testing

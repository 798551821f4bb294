#include "fixsynth/errmetrics.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "fixsynth/error.hpp"
#include "fixsynth/program.hpp"

namespace fixsynth {

ErrorFn ErrorFn::moderated(double delta) {
    if (!(delta > 0) || !std::isfinite(delta)) {
        throw Error(ErrorCode::InvalidArgument, "moderated relative error needs delta > 0");
    }
    return {Kind::Moderated, delta};
}

ErrorFn ErrorFn::parse(std::string_view text) {
    if (text == "absolute") return absolute();
    if (text == "relative") return relative();
    constexpr std::string_view prefix = "moderated:";
    if (text.substr(0, prefix.size()) == prefix) {
        const std::string_view num = text.substr(prefix.size());
        double d = 0;
        auto res = std::from_chars(num.data(), num.data() + num.size(), d);
        if (res.ec == std::errc() && res.ptr == num.data() + num.size()) return moderated(d);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown error function '" + std::string(text) + "'");
}

std::string ErrorFn::to_string() const {
    switch (kind) {
        case Kind::Absolute: return "absolute";
        case Kind::Relative: return "relative";
        case Kind::Moderated: return "moderated:" + format_double(delta);
    }
    return "?";
}

double eval_error(const ErrorFn& fn, double ref, double test) {
    switch (fn.kind) {
        case ErrorFn::Kind::Absolute: return std::fabs(ref - test);
        case ErrorFn::Kind::Relative:
            if (ref == 0.0) throw Error(ErrorCode::RelativeZeroReference, "relative error with zero reference");
            return std::fabs((ref - test) / ref);
        // |ref| + delta keeps the denominator away from zero for negative references too.
        case ErrorFn::Kind::Moderated: return std::fabs(ref - test) / (std::fabs(ref) + fn.delta);
    }
    return 0.0;
}

double eval_error_total(const ErrorFn& fn, double ref, double test) {
    if (fn.kind == ErrorFn::Kind::Relative && ref == 0.0) return ref == test ? 0.0 : std::numeric_limits<double>::infinity();
    return eval_error(fn, ref, test);
}

double program_error(const ErrorFn& fn, std::span<const double> ref, std::span<const double> test) {
    if (ref.size() != test.size()) throw Error(ErrorCode::DimensionMismatch, "output count mismatch");
    double worst = 0.0;
    for (size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, eval_error_total(fn, ref[i], test[i]));
    return worst;
}

}  // namespace fixsynth

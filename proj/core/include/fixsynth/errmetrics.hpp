#pragma once

#include <span>
#include <string>
#include <string_view>

namespace fixsynth {

struct ErrorFn {
    enum class Kind { Absolute, Relative, Moderated };

    Kind kind = Kind::Relative;
    double delta = 0.0;  // Moderated only

    static ErrorFn absolute() { return {Kind::Absolute, 0.0}; }
    static ErrorFn relative() { return {Kind::Relative, 0.0}; }
    static ErrorFn moderated(double delta);
    // "absolute", "relative" or "moderated:<delta>".
    static ErrorFn parse(std::string_view text);

    std::string to_string() const;

    friend bool operator==(const ErrorFn&, const ErrorFn&) = default;
};

// Error of `test` against reference `ref`. Throws Error(RelativeZeroReference)
// for Relative with ref == 0.
double eval_error(const ErrorFn& fn, double ref, double test);

// Like eval_error but total: a zero relative reference scores 0 when test
// matches it exactly and +inf otherwise.
double eval_error_total(const ErrorFn& fn, double ref, double test);

// Max over outputs. Uses eval_error_total.
double program_error(const ErrorFn& fn, std::span<const double> ref, std::span<const double> test);

}  // namespace fixsynth

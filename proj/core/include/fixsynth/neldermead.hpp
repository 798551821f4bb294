#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fixsynth {

struct SimplexConfig {
    double alpha = 1.0;  // reflection
    double gamma = 2.0;  // expansion
    double rho = 0.5;    // contraction
    double sigma = 0.5;  // shrink
    double tol = 1e-6;   // on simplex diameter and objective spread
    int max_iters = 0;   // 0 means 200 * dim

    void validate() const;
};

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    size_t dim() const { return lo.size(); }
    bool contains(std::span<const double> x) const;
    void project(std::vector<double>& x) const;
};

struct MaximizeResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

// Box-constrained Nelder-Mead ascent. Objective exceptions and NaN score -inf.
MaximizeResult maximize(const Objective& f, const Box& box, std::vector<double> x0,
                        const SimplexConfig& cfg = {});

}  // namespace fixsynth

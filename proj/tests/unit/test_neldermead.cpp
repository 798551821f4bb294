#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixsynth/bench.hpp"
#include "fixsynth/error.hpp"
#include "fixsynth/neldermead.hpp"

using namespace fixsynth;

TEST(Maximize, OneDimensional) {
    const auto f = [](std::span<const double> x) { return -(x[0] - 1) * (x[0] - 1); };
    const auto r = maximize(f, Box{{0}, {2}}, {0.2});
    EXPECT_NEAR(r.x[0], 1.0, 1e-4);
    EXPECT_EQ(r.f, f(r.x));
}

TEST(Maximize, TwoDimensional) {
    const auto f = [](std::span<const double> x) {
        return -(x[0] - 0.3) * (x[0] - 0.3) - (x[1] + 0.7) * (x[1] + 0.7);
    };
    const auto r = maximize(f, Box{{-1, -1}, {1, 1}}, {0, 0});
    EXPECT_NEAR(r.x[0], 0.3, 1e-3);
    EXPECT_NEAR(r.x[1], -0.7, 1e-3);
}

TEST(Maximize, OptimumOnBoundary) {
    const auto f = [](std::span<const double> x) { return x[0] + 2 * x[1]; };
    const auto r = maximize(f, Box{{0, 0}, {1, 3}}, {0.5, 0.5});
    EXPECT_NEAR(r.x[0], 1.0, 1e-4);
    EXPECT_NEAR(r.x[1], 3.0, 1e-4);
}

TEST(Maximize, Errors) {
    const auto f = [](std::span<const double>) { return 0.0; };
    EXPECT_THROW(maximize(f, Box{{0, 0}, {1, 1}}, {0.5}), Error);
    EXPECT_THROW(maximize(f, Box{{0}, {1}}, {2.0}), Error);
    SimplexConfig bad;
    bad.rho = 1.5;
    EXPECT_THROW(maximize(f, Box{{0}, {1}}, {0.5}, bad), Error);
}

TEST(Maximize, DegenerateBoxReturnsStart) {
    int calls = 0;
    const auto f = [&](std::span<const double> x) { ++calls; return x[0]; };
    const auto r = maximize(f, Box{{0.4, 2}, {0.4, 2}}, {0.4, 2});
    EXPECT_EQ(r.x, (std::vector<double>{0.4, 2}));
    EXPECT_EQ(r.iterations, 0);
    EXPECT_LE(calls, 1);
}

TEST(Maximize, ToleratesFailures) {
    // throws on the left half, NaN in a band, peak at 0.8
    const auto f = [](std::span<const double> x) {
        if (x[0] < 0.5) throw Error(ErrorCode::DivisionByZero, "left");
        if (x[0] > 0.55 && x[0] < 0.6) return std::nan("");
        return -std::fabs(x[0] - 0.8);
    };
    const auto r = maximize(f, Box{{0}, {1}}, {0.7});
    EXPECT_NEAR(r.x[0], 0.8, 1e-4);
    const auto s = maximize(f, Box{{0}, {1}}, {0.1});
    EXPECT_TRUE(std::isfinite(s.f) || s.f == -INFINITY);
}

TEST(MaximizeProperty, FeasibleAscendingDeterministic) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 200; ++k) {
        const double a = u(gen) * 10, b = u(gen) * 10, c = u(gen) * 6;
        const auto f = [&](std::span<const double> x) {
            return std::sin(a * x[0]) * std::cos(b * x[1]) + c * x[0] * x[1] - x[1] * x[1];
        };
        const Box box{{-1, 0}, {2, 0.5}};
        const std::vector<double> x0{-1 + 3 * u(gen), 0.5 * u(gen)};
        const auto r = maximize(f, box, x0);
        EXPECT_TRUE(box.contains(r.x));
        EXPECT_GE(r.f, f(x0));
        const auto again = maximize(f, box, x0);
        EXPECT_EQ(again.x, r.x);
        EXPECT_EQ(again.f, r.f);
    }
}

TEST(Maximize, FindsCircleWl8Violation) {
    const BenchCase bc = builtin("circle");
    const Program& p = bc.program;
    std::vector<FxFormat> fm(p.size());
    fm[p.index_of("radius")] = FxFormat::parse("0:1:7");
    fm[p.index_of("mypi")] = FxFormat::parse("0:2:6");
    fm[p.index_of("t")] = FxFormat::parse("0:2:6");
    fm[p.index_of("area")] = FxFormat::parse("0:4:4");
    const TypeAssignment ta(fm);
    const auto f = [&](std::span<const double> x) {
        const double ref = eval_float(p, x).outputs[0];
        return std::fabs(ref - eval_fixed(p, x, ta).outputs[0]) / ref;
    };
    const Interval d = p.var(p.inputs()[0]).domain;
    double best = 0;
    for (int s = 0; s < 10; ++s) {
        const double x0 = d.lower_in() + (d.upper_in() - d.lower_in()) * (s + 0.5) / 10;
        best = std::max(best, maximize(f, Box{{d.lower_in()}, {d.upper_in()}}, {x0}).f);
    }
    EXPECT_GT(best, 0.01);
}

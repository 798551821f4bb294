#include <gtest/gtest.h>

#include "fixsynth/bench.hpp"
#include "fixsynth/costmodel.hpp"

using namespace fixsynth;

namespace {

const Program& circle() {
    static const Program p = builtin("circle").program;
    return p;
}

TypeAssignment circle_types(const char* radius, const char* mypi, const char* t, const char* area) {
    const Program& p = circle();
    std::vector<FxFormat> f(p.size());
    f[p.index_of("radius")] = FxFormat::parse(radius);
    f[p.index_of("mypi")] = FxFormat::parse(mypi);
    f[p.index_of("t")] = FxFormat::parse(t);
    f[p.index_of("area")] = FxFormat::parse(area);
    return TypeAssignment(f);
}

TypeAssignment circle_wl(int radius, int mypi, int t, int area) {
    const Program& p = circle();
    std::vector<FxFormat> f(p.size());
    f[p.index_of("radius")] = FxFormat::make(false, 1, radius - 1);
    f[p.index_of("mypi")] = FxFormat::make(false, 2, mypi - 2);
    f[p.index_of("t")] = FxFormat::make(false, 2, t - 2);
    f[p.index_of("area")] = FxFormat::make(false, 4, area - 4);
    return TypeAssignment(f);
}

const ConstantinidesModel kModel;

}  // namespace

TEST(NodeCosts, Formulas) {
    EXPECT_EQ(cdelay(8), 9);
    EXPECT_EQ(cdelay(5), 6);
    EXPECT_EQ(cdelay(12), 13);
    EXPECT_NEAR(cmul(12, 12, 12), 83.4, 1e-12);
    EXPECT_NEAR(cmul(10, 10, 13), 60.05, 1e-12);
    EXPECT_NEAR(cmul(13, 5, 14), 38.60, 1e-12);
    EXPECT_EQ(cadd(7, 9, 12), 10);
}

TEST(ProgramCost, CircleGoldenNumbers) {
    EXPECT_NEAR(program_cost(circle(), circle_types("0:1:7", "0:2:6", "0:2:6", "0:4:4"), kModel), 81.80, 1e-9);
    EXPECT_NEAR(program_cost(circle(), circle_types("0:1:11", "0:2:10", "0:2:10", "0:4:8"), kModel), 179.80, 1e-9);
    EXPECT_NEAR(program_cost(circle(), circle_types("0:1:15", "0:2:14", "0:2:14", "0:4:12"), kModel), 316.20, 1e-9);
    EXPECT_NEAR(program_cost(circle(), circle_types("0:1:9", "0:2:3", "0:2:11", "0:4:10"), kModel), 104.65, 1e-9);
    EXPECT_NEAR(program_cost(circle(), circle_types("0:1:8", "0:2:3", "0:2:10", "0:4:8"), kModel), 89.65, 1e-9);
}

// Hand sum for the circle: cdelay(mypi) + cmul(r, r, t) + cmul(t, mypi, area).
TEST(ProgramCost, CircleDecomposition) {
    for (int r = 1; r <= 20; r += 3) {
        for (int m = 2; m <= 20; m += 4) {
            for (int t = 2; t <= 20; t += 5) {
                for (int a = 4; a <= 20; a += 3) {
                    const double want = cdelay(m) + cmul(r, r, t) + cmul(t, m, a);
                    EXPECT_NEAR(program_cost(circle(), circle_wl(r, m, t, a), kModel), want, 1e-9);
                }
            }
        }
    }
}

TEST(ProgramCost, MonotoneInEachWordlength) {
    for (int r = 1; r <= 63; ++r) {
        for (int m = 2; m <= 63; m += 5) {
            for (int t = 2; t <= 63; t += 5) {
                for (int a = 4; a <= 63; a += 6) {
                    const double c = program_cost(circle(), circle_wl(r, m, t, a), kModel);
                    EXPECT_GE(program_cost(circle(), circle_wl(r + 1, m, t, a), kModel), c);
                    EXPECT_GE(program_cost(circle(), circle_wl(r, m + 1, t, a), kModel), c);
                    EXPECT_GE(program_cost(circle(), circle_wl(r, m, t + 1, a), kModel), c);
                    EXPECT_GE(program_cost(circle(), circle_wl(r, m, t, a + 1), kModel), c);
                }
            }
        }
    }
}

TEST(ProgramCost, NonNegativeWhenSecondOperandHasTwoBits) {
    for (int l1 = 1; l1 <= 64; ++l1)
        for (int l2 = 2; l2 <= 64; ++l2)
            for (int l = 1; l <= 64; ++l) EXPECT_GE(cmul(l1, l2, l), 0.0) << l1 << " " << l2 << " " << l;
    // a one-bit coefficient against a wide operand goes negative
    EXPECT_LT(cmul(32, 1, 1), 0.0);
}

TEST(ProgramCost, CircleNeverNegative) {
    for (int r = 1; r <= 40; ++r)
        for (int m = 2; m <= 40; ++m)
            for (int t = 2; t <= 40; t += 2)
                for (int a = 4; a <= 40; a += 2) EXPECT_GE(program_cost(circle(), circle_wl(r, m, t, a), kModel), 0.0);
}

TEST(ProgramCost, OperandOrder) {
    // constant on either side: l1 is the data operand
    const Program a = parse_program("input x in [0,1];\nconst c = 0.3;\ny = c * x;\noutput y;");
    const Program b = parse_program("input x in [0,1];\nconst c = 0.3;\ny = x * c;\noutput y;");
    const TypeAssignment ta({FxFormat::make(false, 0, 9), FxFormat::make(false, 0, 4), FxFormat::make(false, 0, 11)});
    EXPECT_NEAR(program_cost(a, ta, kModel), cdelay(4) + cmul(9, 4, 11), 1e-12);
    EXPECT_NEAR(program_cost(b, ta, kModel), cdelay(4) + cmul(9, 4, 11), 1e-12);
    // no constant: larger WL first
    const Program c = parse_program("input x in [0,1];\ninput z in [0,1];\ny = x * z;\noutput y;");
    const TypeAssignment tc({FxFormat::make(false, 0, 3), FxFormat::make(false, 0, 7), FxFormat::make(false, 0, 8)});
    EXPECT_NEAR(program_cost(c, tc, kModel), cmul(7, 3, 8), 1e-12);
}

TEST(TableModel, DefaultsMatchConstantinides) {
    const TableCostModel table;
    for (const auto& name : builtin_names()) {
        const Program& p = builtin(name).program;
        std::vector<FxFormat> f;
        int k = 0;
        for (size_t i = 0; i < p.size(); ++i) f.push_back(FxFormat::make(i % 2, 3, 2 + (k++ % 11)));
        const TypeAssignment ta(f);
        EXPECT_NEAR(program_cost(p, ta, table), program_cost(p, ta, kModel), 1e-9) << name;
    }
}

TEST(TableModel, CustomCoefficients) {
    TableCostModel table;
    table.set(NodeKind::Delay, {0, 0, 0, 2, 0, 0});
    EXPECT_EQ(table.node_cost(NodeKind::Delay, 0, 0, 5), 10);
    EXPECT_EQ(TableCostModel::parse_coeffs("1,2,3,4,5,6"), (TableCostModel::Coeffs{1, 2, 3, 4, 5, 6}));
    EXPECT_THROW(TableCostModel::parse_coeffs("1,2"), Error);
    EXPECT_EQ(parse_node_kind("mul"), NodeKind::Mul);
    EXPECT_THROW(parse_node_kind("fft"), Error);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixsynth/bench.hpp"
#include "fixsynth/program.hpp"

using namespace fixsynth;

namespace {

const char* kCircle =
    "input radius in [0.1, 2.0);\n"
    "const mypi = 3.14159265358979323846;\n"
    "t = radius * radius;\n"
    "area = mypi * t;\n"
    "output area;\n";

ErrorCode parse_code(const std::string& src) {
    try {
        parse_program(src);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "parsed without error: " << src;
    return ErrorCode::InvalidArgument;
}

TypeAssignment types(const Program& p, const std::vector<std::pair<std::string, std::string>>& kv) {
    std::vector<FxFormat> f(p.size());
    for (const auto& [name, fmt] : kv) f[static_cast<size_t>(p.index_of(name))] = FxFormat::parse(fmt);
    return TypeAssignment(f);
}

TypeAssignment wide(const Program& p, const std::vector<VarLayout>& lay, int fwl) {
    std::vector<FxFormat> f;
    for (const auto& l : lay) f.push_back(FxFormat::make(l.is_signed, l.iwl, fwl));
    (void)p;
    return TypeAssignment(f);
}

}  // namespace

TEST(Interval, OpenEndpoints) {
    const Interval iv = Interval::make(0.1, 2.0, true, false);
    EXPECT_TRUE(iv.contains(0.1));
    EXPECT_FALSE(iv.contains(2.0));
    EXPECT_LT(iv.upper_in(), 2.0);
    EXPECT_TRUE(iv.contains(iv.upper_in()));
    EXPECT_EQ(iv.clamp(5.0), iv.upper_in());
    EXPECT_THROW(Interval::make(1.0, 1.0, true, false), Error);
    EXPECT_NO_THROW(Interval::make(1.0, 1.0, true, true));
}

TEST(Parse, CircleVariables) {
    const Program p = parse_program(kCircle);
    ASSERT_EQ(p.size(), 4u);
    for (const char* n : {"mypi", "radius", "t", "area"}) EXPECT_TRUE(p.find(n)) << n;
    EXPECT_EQ(p.dimension(), 1u);
    ASSERT_EQ(p.outputs().size(), 1u);
    EXPECT_EQ(p.var(p.outputs()[0]).name, "area");
    EXPECT_EQ(p.var(p.index_of("mypi")).value, 3.14159265358979323846);
}

TEST(Parse, DcMotorHasSixteenDefinitions) {
    const Program& p = builtin("dcmotor_u").program;
    int defs = 0;
    for (const auto& v : p.vars()) defs += v.kind == VarKind::Def;
    EXPECT_EQ(defs, 16);
    EXPECT_TRUE(p.find("t1"));
    EXPECT_TRUE(p.find("t62"));
}

TEST(Parse, Errors) {
    EXPECT_EQ(parse_code("x = y * 2;\noutput x;"), ErrorCode::UseBeforeDef);
    EXPECT_EQ(parse_code("input x in [0,1];\nx = x * 2;\noutput x;"), ErrorCode::DuplicateDefinition);
    EXPECT_EQ(parse_code("input x in [0,1];\noutput z;"), ErrorCode::UnknownIdentifier);
    EXPECT_EQ(parse_code("input x in [0,1];\ny = x;"), ErrorCode::EmptyOutputs);
    EXPECT_EQ(parse_code("input x in [0,1];\ny = x +;\noutput y;"), ErrorCode::ParseError);
    EXPECT_EQ(parse_code("input x in [0,1]\noutput x;"), ErrorCode::ParseError);
}

TEST(Parse, ErrorPosition) {
    try {
        parse_program("input x in [0,1];\ny = x $ 2;\noutput y;");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 7);
    }
}

TEST(Parse, RoundTripBuiltins) {
    for (const auto& name : builtin_names()) {
        const Program& p = builtin(name).program;
        const std::string text = print_program(p);
        const Program q = parse_program(text);
        EXPECT_TRUE(p == q) << name;
        EXPECT_EQ(print_program(q), text) << name;
    }
}

// Random well-formed programs survive print -> parse unchanged.
TEST(Parse, RoundTripRandomPrograms) {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> real(-1e3, 1e3);
    std::uniform_int_distribution<int> pick(0, 99);
    for (int trial = 0; trial < 300; ++trial) {
        Program p;
        const int nin = 1 + pick(gen) % 3;
        for (int i = 0; i < nin; ++i) {
            double lo = real(gen), hi = real(gen);
            if (lo > hi) std::swap(lo, hi);
            p.add_input("in" + std::to_string(i), Interval::make(lo, hi, pick(gen) % 2, pick(gen) % 2),
                        pick(gen) % 4 == 0);
        }
        p.add_const("k", real(gen) / 7.0);
        std::function<ExprPtr(int)> expr = [&](int depth) -> ExprPtr {
            const int r = pick(gen);
            if (depth == 0 || r < 30) {
                if (r % 3 == 0) return Expr::constant(std::ldexp(real(gen), -(r % 20)));
                return Expr::reference(pick(gen) % static_cast<int>(p.size()));
            }
            if (r < 45) return Expr::unary(static_cast<UnaryOp>(r % 4), expr(depth - 1));
            return Expr::binary(static_cast<BinaryOp>(r % 4), expr(depth - 1), expr(depth - 1));
        };
        const int ndef = 1 + pick(gen) % 5;
        for (int d = 0; d < ndef; ++d) p.add_def("d" + std::to_string(d), expr(3));
        p.add_output("d" + std::to_string(ndef - 1));
        const std::string text = print_program(p);
        Program q;
        ASSERT_NO_THROW(q = parse_program(text)) << text;
        EXPECT_TRUE(p == q) << text << "\n---\n" << print_program(q);
    }
}

TEST(EvalFloat, CircleAndDomain) {
    const Program p = parse_program(kCircle);
    const double one = 1.0;
    const FloatTrace t = eval_float(p, std::span(&one, 1));
    EXPECT_EQ(t.outputs.at(0), 3.14159265358979323846);
    const double two = 2.0;
    try {
        eval_float(p, std::span(&two, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DomainViolation);
    }
    EXPECT_NO_THROW(eval_float(p, std::span(&two, 1), false));
    const std::vector<double> bad{1.0, 1.0};
    EXPECT_THROW(eval_float(p, bad), Error);
}

TEST(EvalFloat, DcMotorControlLaw) {
    const Program& p = builtin("dcmotor_u").program;
    const std::vector<double> x{1.0, 1.0, 1.0};
    EXPECT_NEAR(eval_float(p, x).outputs.at(0), 2.0 / 1.01, 1e-12);
}

TEST(EvalFloat, DivisionByZeroNamesVariable) {
    const Program p = parse_program("input x in [-1,1];\ny = 1 / x;\noutput y;");
    const double z = 0.0;
    try {
        eval_float(p, std::span(&z, 1));
        FAIL();
    } catch (const EvalError& e) {
        EXPECT_EQ(e.code(), ErrorCode::DivisionByZero);
        EXPECT_EQ(e.variable(), "y");
    }
}

TEST(EvalFixed, PaperTypesAtRadiusOne) {
    const Program p = parse_program(kCircle);
    const TypeAssignment ta =
        types(p, {{"radius", "0:1:9"}, {"mypi", "0:2:3"}, {"t", "0:2:11"}, {"area", "0:4:10"}});
    const double one = 1.0;
    const double ref = eval_float(p, std::span(&one, 1)).outputs[0];
    const double fx = eval_fixed(p, std::span(&one, 1), ta).outputs[0];
    EXPECT_LE(std::fabs(ref - fx) / ref, 0.01);
}

TEST(EvalFixed, ExactWhenWideEnough) {
    const Program p = parse_program("input x in [0,4];\nconst c = 0.75;\ny = c * x;\nz = y - x;\noutput z;");
    const TypeAssignment ta = types(p, {{"x", "0:2:4"}, {"c", "0:0:2"}, {"y", "0:2:6"}, {"z", "1:2:6"}});
    for (int r = 0; r < 64; ++r) {
        const double x = r / 16.0;
        EXPECT_EQ(eval_fixed(p, std::span(&x, 1), ta).outputs[0], eval_float(p, std::span(&x, 1)).outputs[0]);
    }
}

TEST(EvalFixed, FixedDivisionByZeroIsDistinct) {
    const Program p = parse_program("input x in [0.01,1];\ny = 1 / x;\noutput y;");
    const TypeAssignment ta = types(p, {{"x", "0:0:2"}, {"y", "0:8:4"}});
    const double x = 0.05;  // nonzero in float, 0 after quantization
    EXPECT_NO_THROW(eval_float(p, std::span(&x, 1)));
    try {
        eval_fixed(p, std::span(&x, 1), ta);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::FixedDivisionByZero);
    }
}

TEST(EvalFixed, UniformEightViolatesNearEdge) {
    const Program p = parse_program(kCircle);
    const TypeAssignment ta =
        types(p, {{"radius", "0:1:7"}, {"mypi", "0:2:6"}, {"t", "0:2:6"}, {"area", "0:4:4"}});
    double worst = 0;
    for (double r = 0.1; r < 2.0; r += 1e-4) {
        const double ref = eval_float(p, std::span(&r, 1)).outputs[0];
        const double fx = eval_fixed(p, std::span(&r, 1), ta).outputs[0];
        worst = std::max(worst, std::fabs(ref - fx) / ref);
    }
    EXPECT_GT(worst, 0.01);
}

TEST(EvalFixed, TracesShareKeys) {
    for (const auto& name : builtin_names()) {
        const BenchCase bc = builtin(name);
        const auto pts = sample_domain(bc.program.domains(), 5, 3);
        const auto lay = infer_layout(bc.program, pts);
        const TypeAssignment ta = wide(bc.program, lay, 30);
        for (const auto& x : pts) {
            EXPECT_EQ(eval_float(bc.program, x).values.size(), eval_fixed(bc.program, x, ta).values.size());
        }
    }
}

// Fixed results approach float ones as fractional bits grow.
TEST(EvalFixed, ConvergesToFloat) {
    for (const auto& name : builtin_names()) {
        const BenchCase bc = builtin(name);
        const auto pts = sample_domain(bc.program.domains(), 11, 2000);
        const auto lay = infer_layout(bc.program, pts);
        const TypeAssignment ta = wide(bc.program, lay, 40);
        double worst = 0;
        for (const auto& x : pts) {
            const auto fl = eval_float(bc.program, x).outputs;
            const auto fx = eval_fixed(bc.program, x, ta).outputs;
            for (size_t k = 0; k < fl.size(); ++k) worst = std::max(worst, std::fabs(fl[k] - fx[k]));
        }
        EXPECT_LT(worst, std::ldexp(1.0, -30)) << name;
    }
}

TEST(Sampling, CircleDomainAndDeterminism) {
    const Program p = parse_program(kCircle);
    const auto a = sample_domain(p.domains(), 42, 10);
    const auto b = sample_domain(p.domains(), 42, 10);
    ASSERT_EQ(a.size(), 10u);
    EXPECT_EQ(a, b);
    for (const auto& x : a) {
        EXPECT_GE(x[0], 0.1);
        EXPECT_LT(x[0], 2.0);
    }
    EXPECT_NE(a, sample_domain(p.domains(), 43, 10));
    EXPECT_THROW(sample_domain(p.domains(), 42, 0), Error);
}

TEST(Sampling, PointDomain) {
    const std::vector<Interval> d{Interval::make(0.25, 0.25, true, true)};
    for (const auto& x : sample_domain(d, 1, 20)) EXPECT_EQ(x[0], 0.25);
}

TEST(Sampling, OpenEndpointsNeverHit) {
    const std::vector<Interval> d{Interval::make(0.0, 1e-300, false, false)};
    for (const auto& x : sample_domain(d, 3, 200)) EXPECT_TRUE(d[0].contains(x[0]));
}

TEST(Layout, CircleOverDenseSweep) {
    const Program p = parse_program(kCircle);
    std::vector<Point> s;
    for (double r = 0.1; r < 2.0; r += 1e-3) s.push_back({r});
    const auto lay = infer_layout(p, s);
    EXPECT_EQ(lay[p.index_of("mypi")].iwl, 2);
    EXPECT_EQ(lay[p.index_of("radius")].iwl, 1);
    EXPECT_EQ(lay[p.index_of("t")].iwl, 2);
    EXPECT_EQ(lay[p.index_of("area")].iwl, 4);
    for (const auto& l : lay) EXPECT_FALSE(l.is_signed);
}

TEST(Layout, ZeroAndPowerOfTwo) {
    EXPECT_EQ(iwl_for(0.0, IwlRule::Log2), 0);
    EXPECT_EQ(iwl_for(2.0, IwlRule::Log2), 2);
    EXPECT_GT(2.0, format_range(FxFormat::make(false, 1, 10)).max);
    EXPECT_LE(2.0, format_range(FxFormat::make(false, 2, 10)).max);
    EXPECT_EQ(iwl_for(1.5, IwlRule::Log2), 1);
    EXPECT_EQ(iwl_for(0.3, IwlRule::Log2), 0);
    EXPECT_EQ(iwl_for(1.5, IwlRule::Log2PlusOne), 2);

    const Program p = parse_program("input x in [-1,0];\nz = x - x;\noutput z;");
    const auto lay = infer_layout(p, {{-0.5}, {-1.0}});
    EXPECT_TRUE(lay[p.index_of("x")].is_signed);
    EXPECT_EQ(lay[p.index_of("z")].iwl, 0);
    EXPECT_FALSE(lay[p.index_of("z")].is_signed);
}

// Every observed value fits the inferred integer part.
TEST(Layout, SoundOnItsSamples) {
    for (const auto& name : builtin_names()) {
        const BenchCase bc = builtin(name);
        const auto pts = sample_domain(bc.program.domains(), 9, 500);
        const auto lay = infer_layout(bc.program, pts);
        for (const auto& x : pts) {
            const auto vals = eval_float(bc.program, x).values;
            for (size_t i = 0; i < vals.size(); ++i) {
                const auto r = format_range(FxFormat::make(lay[i].is_signed, lay[i].iwl, 50 - lay[i].iwl > 0 ? 10 : 0));
                EXPECT_LE(std::fabs(vals[i]), std::ldexp(1.0, lay[i].iwl)) << name << " " << bc.program.var(int(i)).name;
                EXPECT_GE(vals[i], lay[i].is_signed ? r.min : 0.0);
            }
        }
    }
}

TEST(TypesJson, RoundTripAndErrors) {
    const Program p = parse_program(kCircle);
    const TypeAssignment ta =
        types(p, {{"radius", "0:1:9"}, {"mypi", "0:2:3"}, {"t", "0:2:11"}, {"area", "0:4:10"}});
    const std::string js = types_to_json(p, ta);
    EXPECT_EQ(types_from_json(p, js), ta);
    EXPECT_EQ(types_from_json(p, R"({"radius":"0:1:9","mypi":"0:2:3","t":"0:2:11","area":"0:4:10"})"), ta);
    EXPECT_THROW(types_from_json(p, R"({"radius":"0:1:9"})"), Error);
    EXPECT_THROW(types_from_json(p, R"({"schema":2,"radius":"0:1:9","mypi":"0:2:3","t":"0:2:11","area":"0:4:10"})"),
                 Error);
    EXPECT_THROW(types_from_json(p, R"({"r":"0:1:9","mypi":"0:2:3","t":"0:2:11","area":"0:4:10"})"), Error);
    EXPECT_THROW(types_from_json(p, "[1,2]"), Error);
}

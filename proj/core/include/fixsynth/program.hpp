#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fixsynth/fxnum.hpp"

namespace fixsynth {

using Point = std::vector<double>;

// Real interval with independently open or closed endpoints.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = true;
    bool hi_closed = true;

    static Interval make(double lo, double hi, bool lo_closed, bool hi_closed);

    bool contains(double x) const;
    // Smallest / largest member, with open endpoints nudged inward.
    double lower_in() const;
    double upper_in() const;
    double clamp(double x) const;
    std::string to_string() const;

    friend bool operator==(const Interval&, const Interval&) = default;
};

enum class VarKind { Input, State, Const, Def };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Const, Ref, Binary, Unary };

    Kind kind = Kind::Const;
    double value = 0.0;  // Const
    int ref = -1;        // Ref: variable index
    BinaryOp bop = BinaryOp::Add;
    UnaryOp uop = UnaryOp::Neg;
    ExprPtr lhs;  // Binary lhs, Unary operand
    ExprPtr rhs;  // Binary rhs

    static ExprPtr constant(double v);
    static ExprPtr reference(int var);
    static ExprPtr binary(BinaryOp op, ExprPtr a, ExprPtr b);
    static ExprPtr unary(UnaryOp op, ExprPtr a);
};

bool structurally_equal(const Expr& a, const Expr& b);

struct Variable {
    std::string name;
    VarKind kind = VarKind::Def;
    Interval domain;    // Input, State
    double value = 0;   // Const
    ExprPtr expr;       // Def
};

class Program {
public:
    int add_input(const std::string& name, const Interval& dom, bool state = false);
    int add_const(const std::string& name, double value);
    int add_def(const std::string& name, ExprPtr expr);
    void add_output(const std::string& name);

    const std::vector<Variable>& vars() const { return vars_; }
    const Variable& var(int i) const { return vars_[static_cast<size_t>(i)]; }
    // Indices of Input and State variables; defines the order of point coordinates.
    const std::vector<int>& inputs() const { return inputs_; }
    const std::vector<int>& outputs() const { return outputs_; }
    size_t dimension() const { return inputs_.size(); }
    size_t size() const { return vars_.size(); }
    std::vector<Interval> domains() const;

    std::optional<int> find(std::string_view name) const;
    int index_of(std::string_view name) const;

    bool operator==(const Program& other) const;

private:
    int add_var(Variable v);

    std::vector<Variable> vars_;
    std::vector<int> inputs_;
    std::vector<int> outputs_;
    std::unordered_map<std::string, int> index_;
};

Program parse_program(std::string_view text);
Program load_program(const std::string& path);
std::string print_program(const Program& p);
std::string format_double(double v);

// One format per program variable, indexed like Program::vars().
class TypeAssignment {
public:
    TypeAssignment() = default;
    explicit TypeAssignment(std::vector<FxFormat> formats) : formats_(std::move(formats)) {}

    size_t size() const { return formats_.size(); }
    const FxFormat& operator[](size_t i) const { return formats_[i]; }
    FxFormat& operator[](size_t i) { return formats_[i]; }
    const std::vector<FxFormat>& formats() const { return formats_; }

    friend bool operator==(const TypeAssignment&, const TypeAssignment&) = default;

private:
    std::vector<FxFormat> formats_;
};

void check_total(const Program& p, const TypeAssignment& ta);
std::string types_to_json(const Program& p, const TypeAssignment& ta);
TypeAssignment types_from_json(const Program& p, std::string_view json);
TypeAssignment load_types(const Program& p, const std::string& path);

struct FloatTrace {
    std::vector<double> values;   // per variable
    std::vector<double> outputs;  // per output, in order
};

struct FixedTrace {
    std::vector<FxValue> values;
    std::vector<double> outputs;
};

FloatTrace eval_float(const Program& p, std::span<const double> point, bool check_domain = true);

FixedTrace eval_fixed(const Program& p, std::span<const double> point, const TypeAssignment& ta,
                      RoundingMode rm = kDefaultRounding, OverflowMode om = kDefaultOverflow,
                      bool check_domain = true);

// Inputs given as fixed-point values; each is converted to its assigned format.
FixedTrace eval_fixed(const Program& p, std::span<const FxValue> inputs, const TypeAssignment& ta,
                      RoundingMode rm = kDefaultRounding, OverflowMode om = kDefaultOverflow);

// Allocation-light variant used by the synthesis inner loops. `scratch` is resized as needed.
void eval_fixed_outputs(const Program& p, std::span<const double> point, const TypeAssignment& ta,
                        RoundingMode rm, OverflowMode om, std::vector<FxValue>& scratch,
                        std::vector<double>& outputs);

// 64-bit Mersenne twister with a 53-bit uniform draw.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform01();
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

std::vector<Point> sample_domain(const std::vector<Interval>& doms, Rng& rng, int n);
std::vector<Point> sample_domain(const std::vector<Interval>& doms, std::uint64_t seed, int n);

enum class IwlRule { Log2, Log2PlusOne };

IwlRule parse_iwl_rule(std::string_view s);
const char* to_string(IwlRule r);

struct VarLayout {
    bool is_signed = false;
    int iwl = 0;
    double maxabs = 0.0;
};

int iwl_for(double maxabs, IwlRule rule);
std::vector<VarLayout> infer_layout(const Program& p, const std::vector<Point>& samples,
                                    IwlRule rule = IwlRule::Log2);

}  // namespace fixsynth

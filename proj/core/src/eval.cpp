#include <cmath>

#include "fixsynth/program.hpp"

namespace fixsynth {

namespace {

void check_point(const Program& p, size_t n, bool check_domain, std::span<const double> point) {
    if (n != p.dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "point has " + std::to_string(n) + " coordinates, program has " +
                                                      std::to_string(p.dimension()) + " inputs");
    }
    if (!check_domain) return;
    for (size_t k = 0; k < n; ++k) {
        const Variable& v = p.var(p.inputs()[k]);
        if (!v.domain.contains(point[k])) {
            throw EvalError(ErrorCode::DomainViolation, v.name,
                            format_double(point[k]) + " outside domain " + v.domain.to_string());
        }
    }
}

double float_node(const Expr& e, const std::vector<double>& vals, const std::string& var) {
    double r = 0;
    switch (e.kind) {
        case Expr::Kind::Const: return e.value;
        case Expr::Kind::Ref: return vals[static_cast<size_t>(e.ref)];
        case Expr::Kind::Binary: {
            const double a = float_node(*e.lhs, vals, var);
            const double b = float_node(*e.rhs, vals, var);
            switch (e.bop) {
                case BinaryOp::Add: r = a + b; break;
                case BinaryOp::Sub: r = a - b; break;
                case BinaryOp::Mul: r = a * b; break;
                case BinaryOp::Div:
                    if (b == 0.0) throw EvalError(ErrorCode::DivisionByZero, var, "division by zero");
                    r = a / b;
                    break;
            }
            break;
        }
        case Expr::Kind::Unary: {
            const double a = float_node(*e.lhs, vals, var);
            switch (e.uop) {
                case UnaryOp::Neg: r = -a; break;
                case UnaryOp::Sin: r = std::sin(a); break;
                case UnaryOp::Cos: r = std::cos(a); break;
                case UnaryOp::Recip:
                    if (a == 0.0) throw EvalError(ErrorCode::DivisionByZero, var, "reciprocal of zero");
                    r = 1.0 / a;
                    break;
            }
            break;
        }
    }
    if (!std::isfinite(r)) throw EvalError(ErrorCode::NonFinite, var, "non-finite intermediate value");
    return r;
}

struct FixedCtx {
    const std::vector<FxValue>& vals;
    RoundingMode rm;
    OverflowMode om;
    const std::string& var;
};

FxValue fixed_node(const Expr& e, const FxFormat& dst, const FixedCtx& ctx);

// Variable references keep their own format; anything else is computed in dst.
FxValue fixed_operand(const Expr& e, const FxFormat& dst, const FixedCtx& ctx) {
    if (e.kind == Expr::Kind::Ref) return ctx.vals[static_cast<size_t>(e.ref)];
    return fixed_node(e, dst, ctx);
}

FxValue fixed_node(const Expr& e, const FxFormat& dst, const FixedCtx& ctx) {
    try {
        switch (e.kind) {
            case Expr::Kind::Const: return quantize(e.value, dst, ctx.rm, ctx.om);
            case Expr::Kind::Ref: return convert(ctx.vals[static_cast<size_t>(e.ref)], dst, ctx.rm, ctx.om);
            case Expr::Kind::Binary:
                return fx_binop(e.bop, fixed_operand(*e.lhs, dst, ctx), fixed_operand(*e.rhs, dst, ctx), dst,
                                ctx.rm, ctx.om);
            case Expr::Kind::Unary:
                return fx_unop(e.uop, fixed_operand(*e.lhs, dst, ctx), dst, ctx.rm, ctx.om);
        }
    } catch (const FxDivisionByZero& ex) {
        throw EvalError(ErrorCode::FixedDivisionByZero, ctx.var, ex.what());
    }
    throw Error(ErrorCode::InvalidArgument, "bad expression node");
}

template <typename InputFn>
void run_fixed(const Program& p, const TypeAssignment& ta, RoundingMode rm, OverflowMode om,
               std::vector<FxValue>& vals, std::vector<double>& outputs, InputFn input_value) {
    vals.resize(p.size());
    size_t next_input = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        const Variable& v = p.vars()[i];
        const FxFormat& fmt = ta[i];
        switch (v.kind) {
            case VarKind::Input:
            case VarKind::State: vals[i] = input_value(next_input++, fmt); break;
            case VarKind::Const: vals[i] = quantize(v.value, fmt, rm, om); break;
            case VarKind::Def: {
                FixedCtx ctx{vals, rm, om, v.name};
                vals[i] = fixed_node(*v.expr, fmt, ctx);
                break;
            }
        }
    }
    outputs.resize(p.outputs().size());
    for (size_t k = 0; k < outputs.size(); ++k) {
        outputs[k] = vals[static_cast<size_t>(p.outputs()[k])].to_real();
    }
}

}  // namespace

FloatTrace eval_float(const Program& p, std::span<const double> point, bool check_domain) {
    check_point(p, point.size(), check_domain, point);
    FloatTrace tr;
    tr.values.resize(p.size());
    size_t next_input = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        const Variable& v = p.vars()[i];
        switch (v.kind) {
            case VarKind::Input:
            case VarKind::State: {
                const double x = point[next_input++];
                if (!std::isfinite(x)) throw EvalError(ErrorCode::NonFinite, v.name, "non-finite input");
                tr.values[i] = x;
                break;
            }
            case VarKind::Const: tr.values[i] = v.value; break;
            case VarKind::Def: tr.values[i] = float_node(*v.expr, tr.values, v.name); break;
        }
    }
    tr.outputs.reserve(p.outputs().size());
    for (int o : p.outputs()) tr.outputs.push_back(tr.values[static_cast<size_t>(o)]);
    return tr;
}

void eval_fixed_outputs(const Program& p, std::span<const double> point, const TypeAssignment& ta,
                        RoundingMode rm, OverflowMode om, std::vector<FxValue>& scratch,
                        std::vector<double>& outputs) {
    run_fixed(p, ta, rm, om, scratch, outputs, [&](size_t k, const FxFormat& fmt) {
        const int idx = p.inputs()[k];
        try {
            return quantize(point[k], fmt, rm, om);
        } catch (const Error& e) {
            throw EvalError(e.code(), p.var(idx).name, e.what());
        }
    });
}

FixedTrace eval_fixed(const Program& p, std::span<const double> point, const TypeAssignment& ta,
                      RoundingMode rm, OverflowMode om, bool check_domain) {
    check_point(p, point.size(), check_domain, point);
    check_total(p, ta);
    FixedTrace tr;
    eval_fixed_outputs(p, point, ta, rm, om, tr.values, tr.outputs);
    return tr;
}

FixedTrace eval_fixed(const Program& p, std::span<const FxValue> inputs, const TypeAssignment& ta,
                      RoundingMode rm, OverflowMode om) {
    if (inputs.size() != p.dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(p.dimension()) + " inputs");
    }
    check_total(p, ta);
    FixedTrace tr;
    run_fixed(p, ta, rm, om, tr.values, tr.outputs,
              [&](size_t k, const FxFormat& fmt) { return convert(inputs[k], fmt, rm, om); });
    return tr;
}

}  // namespace fixsynth

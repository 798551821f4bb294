#include "fixsynth/costmodel.hpp"

#include <algorithm>
#include <charconv>

namespace fixsynth {

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Delay: return "delay";
        case NodeKind::Mul: return "mul";
        case NodeKind::AddSub: return "add";
        case NodeKind::Div: return "div";
        case NodeKind::Unary: return "unary";
        case NodeKind::Neg: return "neg";
    }
    return "?";
}

NodeKind parse_node_kind(std::string_view s) {
    for (NodeKind k : {NodeKind::Delay, NodeKind::Mul, NodeKind::AddSub, NodeKind::Div, NodeKind::Unary,
                       NodeKind::Neg}) {
        if (s == to_string(k)) return k;
    }
    throw Error(ErrorCode::ConfigError, "unknown cost node kind '" + std::string(s) + "'");
}

double cdelay(int l) { return l + 1.0; }

double cmul(int l1, int l2, int l) { return 0.6 * (l1 + 1) * l2 - 0.85 * (l1 + l2 - l); }

double cadd(int l1, int l2, int /*l*/) { return std::max(l1, l2) + 1.0; }

double ConstantinidesModel::node_cost(NodeKind kind, int l1, int l2, int l) const {
    switch (kind) {
        case NodeKind::Delay: return cdelay(l);
        case NodeKind::Mul:
        case NodeKind::Div: return cmul(l1, l2, l);
        case NodeKind::AddSub: return cadd(l1, l2, l);
        case NodeKind::Unary: return cdelay(l);
        case NodeKind::Neg: return 0.0;
    }
    return 0.0;
}

TableCostModel::TableCostModel() {
    table_[NodeKind::Delay] = {1, 0, 0, 1, 0, 0};
    table_[NodeKind::Mul] = {0, -0.85, -0.25, 0.85, 0.6, 0};
    table_[NodeKind::Div] = {0, -0.85, -0.25, 0.85, 0.6, 0};
    table_[NodeKind::AddSub] = {1, 0, 0, 0, 0, 1};
    table_[NodeKind::Unary] = {1, 0, 0, 1, 0, 0};
    table_[NodeKind::Neg] = {0, 0, 0, 0, 0, 0};
}

double TableCostModel::node_cost(NodeKind kind, int l1, int l2, int l) const {
    const Coeffs& c = table_.at(kind);
    return c[0] + c[1] * l1 + c[2] * l2 + c[3] * l + c[4] * l1 * l2 + c[5] * std::max(l1, l2);
}

TableCostModel::Coeffs TableCostModel::parse_coeffs(std::string_view text) {
    Coeffs c{};
    size_t n = 0;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    while (p < end) {
        while (p < end && (*p == ' ' || *p == '\t')) ++p;
        if (n == c.size()) throw Error(ErrorCode::ConfigError, "too many cost coefficients");
        auto res = std::from_chars(p, end, c[n]);
        if (res.ec != std::errc()) throw Error(ErrorCode::ConfigError, "bad cost coefficient in '" + std::string(text) + "'");
        ++n;
        p = res.ptr;
        while (p < end && (*p == ' ' || *p == '\t')) ++p;
        if (p < end) {
            if (*p != ',') throw Error(ErrorCode::ConfigError, "bad cost coefficient list '" + std::string(text) + "'");
            ++p;
        }
    }
    if (n != c.size()) throw Error(ErrorCode::ConfigError, "cost coefficient list needs 6 values");
    return c;
}

namespace {

struct Operand {
    int wl;
    bool is_const;
};

double expr_cost(const Program& p, const TypeAssignment& ta, const CostModel& m, const Expr& e, int dst,
                 Operand* as_operand);

Operand operand_of(const Program& p, const TypeAssignment& ta, const CostModel& m, const Expr& e, int dst,
                   double& cost) {
    Operand op{dst, false};
    cost += expr_cost(p, ta, m, e, dst, &op);
    return op;
}

double expr_cost(const Program& p, const TypeAssignment& ta, const CostModel& m, const Expr& e, int dst,
                 Operand* as_operand) {
    switch (e.kind) {
        case Expr::Kind::Ref: {
            const FxFormat& f = ta[static_cast<size_t>(e.ref)];
            if (as_operand) *as_operand = {f.wordlength(), p.var(e.ref).kind == VarKind::Const};
            return 0.0;
        }
        case Expr::Kind::Const:
            // an inline literal is stored in the destination format
            if (as_operand) *as_operand = {dst, true};
            return m.node_cost(NodeKind::Delay, 0, 0, dst);
        case Expr::Kind::Unary: {
            double cost = 0.0;
            const Operand a = operand_of(p, ta, m, *e.lhs, dst, cost);
            switch (e.uop) {
                case UnaryOp::Neg: return cost + m.node_cost(NodeKind::Neg, a.wl, 0, dst);
                case UnaryOp::Sin:
                case UnaryOp::Cos: return cost + m.node_cost(NodeKind::Unary, a.wl, 0, dst);
                case UnaryOp::Recip: return cost + m.node_cost(NodeKind::Div, a.wl, a.wl, dst);
            }
            return cost;
        }
        case Expr::Kind::Binary: {
            double cost = 0.0;
            const Operand a = operand_of(p, ta, m, *e.lhs, dst, cost);
            const Operand b = operand_of(p, ta, m, *e.rhs, dst, cost);
            int l1 = std::max(a.wl, b.wl);
            int l2 = std::min(a.wl, b.wl);
            if (a.is_const != b.is_const) {
                l1 = a.is_const ? b.wl : a.wl;
                l2 = a.is_const ? a.wl : b.wl;
            }
            NodeKind kind = NodeKind::AddSub;
            if (e.bop == BinaryOp::Mul) kind = NodeKind::Mul;
            if (e.bop == BinaryOp::Div) kind = NodeKind::Div;
            return cost + m.node_cost(kind, l1, l2, dst);
        }
    }
    return 0.0;
}

}  // namespace

double program_cost(const Program& p, const TypeAssignment& ta, const CostModel& model) {
    check_total(p, ta);
    double total = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const Variable& v = p.vars()[i];
        const int wl = ta[i].wordlength();
        switch (v.kind) {
            case VarKind::Input: break;
            case VarKind::State:
            case VarKind::Const: total += model.node_cost(NodeKind::Delay, 0, 0, wl); break;
            case VarKind::Def: total += expr_cost(p, ta, model, *v.expr, wl, nullptr); break;
        }
    }
    return total;
}

}  // namespace fixsynth

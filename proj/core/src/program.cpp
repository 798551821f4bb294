#include "fixsynth/program.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fixsynth {

Interval Interval::make(double lo, double hi, bool lo_closed, bool hi_closed) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(ErrorCode::InvalidArgument, "interval bounds must be finite");
    }
    if (!(lo < hi || (lo == hi && lo_closed && hi_closed))) {
        throw Error(ErrorCode::InvalidArgument, "empty interval " +
                                                    Interval{lo, hi, lo_closed, hi_closed}.to_string());
    }
    return {lo, hi, lo_closed, hi_closed};
}

bool Interval::contains(double x) const {
    const bool above = lo_closed ? x >= lo : x > lo;
    const bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
}

namespace {

double nudge(double v, double dir) {
    const double step = std::max(std::ldexp(std::fabs(v), -52), std::numeric_limits<double>::denorm_min());
    return v + dir * step;
}

}  // namespace

double Interval::lower_in() const {
    if (lo_closed) return lo;
    const double v = nudge(lo, 1.0);
    return v < hi ? v : (lo + hi) / 2;
}

double Interval::upper_in() const {
    if (hi_closed) return hi;
    const double v = nudge(hi, -1.0);
    return v > lo ? v : (lo + hi) / 2;
}

double Interval::clamp(double x) const {
    if (x < lower_in()) return lower_in();
    if (x > upper_in()) return upper_in();
    return x;
}

std::string Interval::to_string() const {
    return std::string(lo_closed ? "[" : "(") + format_double(lo) + ", " + format_double(hi) +
           (hi_closed ? "]" : ")");
}

ExprPtr Expr::constant(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Const;
    e->value = v;
    return e;
}

ExprPtr Expr::reference(int var) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Ref;
    e->ref = var;
    return e;
}

ExprPtr Expr::binary(BinaryOp op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Binary;
    e->bop = op;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

ExprPtr Expr::unary(UnaryOp op, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Unary;
    e->uop = op;
    e->lhs = std::move(a);
    return e;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Expr::Kind::Const: return a.value == b.value;
        case Expr::Kind::Ref: return a.ref == b.ref;
        case Expr::Kind::Binary:
            return a.bop == b.bop && structurally_equal(*a.lhs, *b.lhs) &&
                   structurally_equal(*a.rhs, *b.rhs);
        case Expr::Kind::Unary: return a.uop == b.uop && structurally_equal(*a.lhs, *b.lhs);
    }
    return false;
}

int Program::add_var(Variable v) {
    if (index_.count(v.name) != 0) {
        throw Error(ErrorCode::DuplicateDefinition, "duplicate definition of '" + v.name + "'");
    }
    const int idx = static_cast<int>(vars_.size());
    index_.emplace(v.name, idx);
    vars_.push_back(std::move(v));
    return idx;
}

int Program::add_input(const std::string& name, const Interval& dom, bool state) {
    Variable v;
    v.name = name;
    v.kind = state ? VarKind::State : VarKind::Input;
    v.domain = dom;
    const int idx = add_var(std::move(v));
    inputs_.push_back(idx);
    return idx;
}

int Program::add_const(const std::string& name, double value) {
    if (!std::isfinite(value)) throw Error(ErrorCode::InvalidArgument, "constant '" + name + "' is not finite");
    Variable v;
    v.name = name;
    v.kind = VarKind::Const;
    v.value = value;
    return add_var(std::move(v));
}

int Program::add_def(const std::string& name, ExprPtr expr) {
    Variable v;
    v.name = name;
    v.kind = VarKind::Def;
    v.expr = std::move(expr);
    return add_var(std::move(v));
}

void Program::add_output(const std::string& name) {
    const auto idx = find(name);
    if (!idx) throw Error(ErrorCode::UnknownIdentifier, "unknown output '" + name + "'");
    for (int o : outputs_) {
        if (o == *idx) throw Error(ErrorCode::DuplicateDefinition, "duplicate output '" + name + "'");
    }
    outputs_.push_back(*idx);
}

std::vector<Interval> Program::domains() const {
    std::vector<Interval> out;
    out.reserve(inputs_.size());
    for (int i : inputs_) out.push_back(vars_[static_cast<size_t>(i)].domain);
    return out;
}

std::optional<int> Program::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int Program::index_of(std::string_view name) const {
    auto idx = find(name);
    if (!idx) throw Error(ErrorCode::UnknownIdentifier, "unknown variable '" + std::string(name) + "'");
    return *idx;
}

bool Program::operator==(const Program& other) const {
    if (vars_.size() != other.vars_.size() || inputs_ != other.inputs_ || outputs_ != other.outputs_) {
        return false;
    }
    for (size_t i = 0; i < vars_.size(); ++i) {
        const Variable& a = vars_[i];
        const Variable& b = other.vars_[i];
        if (a.name != b.name || a.kind != b.kind) return false;
        switch (a.kind) {
            case VarKind::Input:
            case VarKind::State:
                if (!(a.domain == b.domain)) return false;
                break;
            case VarKind::Const:
                if (a.value != b.value) return false;
                break;
            case VarKind::Def:
                if (!structurally_equal(*a.expr, *b.expr)) return false;
                break;
        }
    }
    return true;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

int precedence(const Expr& e) {
    if (e.kind == Expr::Kind::Binary) {
        return (e.bop == BinaryOp::Add || e.bop == BinaryOp::Sub) ? 1 : 2;
    }
    return 3;
}

void print_expr(const Program& p, const Expr& e, std::ostream& os) {
    switch (e.kind) {
        case Expr::Kind::Const: os << format_double(e.value); return;
        case Expr::Kind::Ref: os << p.var(e.ref).name; return;
        case Expr::Kind::Unary:
            if (e.uop == UnaryOp::Neg) {
                const bool paren = e.lhs->kind == Expr::Kind::Binary || e.lhs->kind == Expr::Kind::Const;
                os << "-";
                if (paren) os << "(";
                print_expr(p, *e.lhs, os);
                if (paren) os << ")";
            } else {
                os << to_string(e.uop) << "(";
                print_expr(p, *e.lhs, os);
                os << ")";
            }
            return;
        case Expr::Kind::Binary: {
            const int prec = precedence(e);
            const bool lp = precedence(*e.lhs) < prec;
            const bool rp = precedence(*e.rhs) <= prec;
            if (lp) os << "(";
            print_expr(p, *e.lhs, os);
            if (lp) os << ")";
            os << " " << to_string(e.bop) << " ";
            if (rp) os << "(";
            print_expr(p, *e.rhs, os);
            if (rp) os << ")";
            return;
        }
    }
}

}  // namespace

std::string print_program(const Program& p) {
    std::ostringstream os;
    for (const Variable& v : p.vars()) {
        switch (v.kind) {
            case VarKind::Input: os << "input " << v.name << " in " << v.domain.to_string() << ";\n"; break;
            case VarKind::State: os << "state " << v.name << " in " << v.domain.to_string() << ";\n"; break;
            case VarKind::Const: os << "const " << v.name << " = " << format_double(v.value) << ";\n"; break;
            case VarKind::Def:
                os << v.name << " = ";
                print_expr(p, *v.expr, os);
                os << ";\n";
                break;
        }
    }
    for (int o : p.outputs()) os << "output " << p.var(o).name << ";\n";
    return os.str();
}

Program load_program(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open program file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_program(ss.str());
}

void check_total(const Program& p, const TypeAssignment& ta) {
    if (ta.size() != p.size()) {
        throw Error(ErrorCode::InvalidArgument, "type assignment covers " + std::to_string(ta.size()) +
                                                    " variables, program has " + std::to_string(p.size()));
    }
    for (size_t i = 0; i < ta.size(); ++i) {
        if (!ta[i].valid()) {
            throw Error(ErrorCode::InvalidFormat,
                        "invalid format " + ta[i].to_string() + " for '" + p.var(static_cast<int>(i)).name + "'");
        }
    }
}

std::string types_to_json(const Program& p, const TypeAssignment& ta) {
    check_total(p, ta);
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    // A variable may itself be called "schema"; the version key is dropped then.
    if (!p.find("schema")) j["schema"] = 1;
    for (size_t i = 0; i < ta.size(); ++i) j[p.var(static_cast<int>(i)).name] = ta[i].to_string();
    return j.dump(2) + "\n";
}

TypeAssignment types_from_json(const Program& p, std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed types JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "types JSON must be an object");
    const bool schema_is_var = p.find("schema").has_value();
    if (!schema_is_var && j.contains("schema") && j["schema"] != 1) {
        throw Error(ErrorCode::InvalidArgument, "unsupported types schema");
    }
    std::vector<FxFormat> formats(p.size());
    std::vector<bool> seen(p.size(), false);
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "schema" && !schema_is_var) continue;
        const auto idx = p.find(it.key());
        if (!idx) throw Error(ErrorCode::UnknownIdentifier, "types JSON names unknown variable '" + it.key() + "'");
        if (!it.value().is_string()) {
            throw Error(ErrorCode::InvalidFormat, "format for '" + it.key() + "' must be a string");
        }
        formats[static_cast<size_t>(*idx)] = FxFormat::parse(it.value().get<std::string>());
        seen[static_cast<size_t>(*idx)] = true;
    }
    for (size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw Error(ErrorCode::InvalidArgument,
                        "types JSON is missing variable '" + p.var(static_cast<int>(i)).name + "'");
        }
    }
    return TypeAssignment(std::move(formats));
}

TypeAssignment load_types(const Program& p, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open types file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return types_from_json(p, ss.str());
}

}  // namespace fixsynth

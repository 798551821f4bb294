#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "fixsynth/program.hpp"

namespace fixsynth {

// Node kinds priced by a cost model. For Delay only `l` is meaningful; for
// Unary `l1` is the operand WL. Binary nodes receive (l1, l2) already ordered
// by the operand convention in program_cost.
enum class NodeKind { Delay, Mul, AddSub, Div, Unary, Neg };

const char* to_string(NodeKind k);

class CostModel {
public:
    virtual ~CostModel() = default;
    virtual double node_cost(NodeKind kind, int l1, int l2, int l) const = 0;
    virtual std::string name() const = 0;
};

double cdelay(int l);
double cmul(int l1, int l2, int l);
double cadd(int l1, int l2, int l);

class ConstantinidesModel : public CostModel {
public:
    double node_cost(NodeKind kind, int l1, int l2, int l) const override;
    std::string name() const override { return "constantinides"; }
};

// cost = c0 + c_l1*l1 + c_l2*l2 + c_l*l + c_l1l2*l1*l2 + c_max*max(l1, l2)
class TableCostModel : public CostModel {
public:
    using Coeffs = std::array<double, 6>;

    // Starts from the coefficients equivalent to ConstantinidesModel.
    TableCostModel();
    void set(NodeKind kind, const Coeffs& c) { table_[kind] = c; }
    const Coeffs& get(NodeKind kind) const { return table_.at(kind); }
    double node_cost(NodeKind kind, int l1, int l2, int l) const override;
    std::string name() const override { return "table"; }

    static Coeffs parse_coeffs(std::string_view text);

private:
    std::map<NodeKind, Coeffs> table_;
};

NodeKind parse_node_kind(std::string_view s);

double program_cost(const Program& p, const TypeAssignment& ta, const CostModel& model);

}  // namespace fixsynth

#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "pia/taylor_jet.hpp"

namespace pia {

enum class Op { Num, Var, Param, Neg, Add, Sub, Mul, Div, Pow, Exp, Ln, Sqrt, Sin, Cos };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op;
    cplx num{};
    std::string name;
    NodePtr a, b;
};

using Params = std::map<std::string, cplx>;

class Expression {
public:
    Expression();  // the constant zero
    explicit Expression(NodePtr root) : root_(std::move(root)) {}

    static Expression number(cplx v);
    static Expression variable();
    static Expression parameter(const std::string& name);

    const Node& node() const { return *root_; }
    const NodePtr& root() const { return root_; }

    bool is_number() const { return root_->op == Op::Num; }
    bool is_zero() const { return is_number() && root_->num == cplx(0.0); }
    bool is_one() const { return is_number() && root_->num == cplx(1.0); }
    bool depends_on_x() const;
    std::set<std::string> parameters() const;

private:
    NodePtr root_;
};

// constant-folding constructors
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression pow(const Expression& a, const Expression& b);
Expression apply(Op f, const Expression& a);

Expression parse_expr(std::string_view text);
std::string to_string(const Expression& e);
bool structurally_equal(const Expression& a, const Expression& b);

Expression diff_expr(const Expression& e);
TaylorJet eval_expr_jet(const Expression& e, double x0, int order, const Params& params);
cplx eval_expr(const Expression& e, double x, const Params& params);
// value of an x-independent expression
cplx eval_constant(const Expression& e, const Params& params);

}  // namespace pia
